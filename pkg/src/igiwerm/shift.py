"""Inducing covariate shift on a dataset, and the synthetic regression task.

The projection protocol: standardize the inputs, compute
``v = gain * w.x / sigma`` (sigma = population std of ``w.x`` over the
full pool), then send each example to the training split with probability
``sigmoid(v)``.  The split densities are known in closed form:
``p_tr(x) = sigmoid(v)`` and ``p_te(x) = sigmoid(-v)``.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from scipy.stats import norm

from .data import Dataset
from .errors import ShiftError
from .weights import DensityPair

DEFAULT_GAIN = 16.0


def zscore_standardize(X):
    """Column-wise Z-scores with the population (divide-by-n) std.

    Returns
    -------
    Z, mean, std : ndarray
        Standardized matrix and the statistics needed to apply the same map
        to other data.

    Raises
    ------
    ValueError
        If a column has (numerically) zero variance; names the column.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {X.shape}")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    scale = np.maximum(1.0, np.abs(X).max(axis=0))
    flat = np.flatnonzero(~(std > 1e-12 * scale))
    if flat.size:
        raise ValueError(f"column {int(flat[0])} has zero variance")
    Z = (X - mean) / std
    # one refinement pass pulls the mean/std to within a few ulp
    m2, s2 = Z.mean(axis=0), Z.std(axis=0)
    Z = (Z - m2) / s2
    return Z, mean, std


def destandardize(Z, mean, std):
    return np.asarray(Z) * std + mean


@dataclass(frozen=True)
class ShiftSpec:
    projection: np.ndarray
    scale_sigma: float
    gain: float = DEFAULT_GAIN

    def __post_init__(self):
        w = np.asarray(self.projection, dtype=float).reshape(-1)
        if not np.any(w != 0):
            raise ShiftError("projection vector is zero")
        if not (self.scale_sigma > 0 and np.isfinite(self.scale_sigma)):
            raise ShiftError(f"scale_sigma must be positive, got {self.scale_sigma}")
        object.__setattr__(self, "projection", w)

    def logit(self, X):
        """``v = gain * w.x / sigma`` for each row."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self.gain * (X @ self.projection) / self.scale_sigma

    def train_probability(self, X):
        return expit(self.logit(X))

    def to_dict(self):
        return {
            "projection": self.projection.tolist(),
            "scale_sigma": self.scale_sigma,
            "gain": self.gain,
        }


@dataclass
class SplitDataset:
    train: Dataset
    test: Dataset
    spec: ShiftSpec
    seed: int
    train_index: np.ndarray
    test_index: np.ndarray


def random_projection(d, rng):
    """Direction drawn uniformly on the unit sphere in ``R^d``."""
    while True:
        w = rng.standard_normal(d)
        nrm = np.linalg.norm(w)
        if nrm > 1e-12:
            return w / nrm


def induce_shift(data, projection, seed, gain=DEFAULT_GAIN):
    """Split ``data`` into shifted train/test parts.

    Each example goes to training independently with probability
    ``sigmoid(gain * w.x / sigma)``.  Deterministic given ``seed``.
    """
    w = np.asarray(projection, dtype=float).reshape(-1)
    if w.shape[0] != data.d:
        raise ShiftError(f"projection has length {w.shape[0]}, data has {data.d} features")
    if not np.any(w != 0):
        raise ShiftError("projection vector is zero")
    proj = data.X @ w
    sigma = float(proj.std())
    if not sigma > 1e-12 * max(1.0, float(np.abs(proj).max())):
        raise ShiftError("w.x is constant over the dataset")
    spec = ShiftSpec(w, sigma, gain)
    rng = np.random.default_rng(seed)
    u = rng.random(data.n)
    to_train = u < spec.train_probability(data.X)
    tr, te = np.flatnonzero(to_train), np.flatnonzero(~to_train)
    if tr.size == 0 or te.size == 0:
        raise ShiftError(f"empty split (train={tr.size}, test={te.size})")
    meta = dict(data.meta, seed=seed, shift=spec.to_dict())
    train = Dataset(data.X[tr], data.y[tr], data.task, dict(meta, split="train"))
    test = Dataset(data.X[te], data.y[te], data.task, dict(meta, split="test"))
    return SplitDataset(train, test, spec, seed, tr, te)


def density_pair_from_spec(spec):
    """Closed-form train/test densities induced by ``spec``.

    ``p_te`` is evaluated as ``sigmoid(-v)`` rather than ``1 - sigmoid(v)``
    so it keeps full relative precision where the training density is ~1.
    """
    return DensityPair(
        p_tr=lambda X: expit(spec.logit(X)),
        p_te=lambda X: expit(-spec.logit(X)),
    )


SYNTH_TRAIN_MEAN, SYNTH_TRAIN_VAR = 0.0, 5.0
SYNTH_TEST_MEAN, SYNTH_TEST_VAR = -5.0, 0.5
SYNTH_NOISE_VAR = 5.0


def synth_density_pair():
    sd_tr, sd_te = np.sqrt(SYNTH_TRAIN_VAR), np.sqrt(SYNTH_TEST_VAR)
    return DensityPair(
        p_tr=lambda X: norm.pdf(np.asarray(X)[:, 0], SYNTH_TRAIN_MEAN, sd_tr),
        p_te=lambda X: norm.pdf(np.asarray(X)[:, 0], SYNTH_TEST_MEAN, sd_te),
    )


def synth_regression(n_tr, n_te, seed):
    """One-dimensional quadratic regression under a known covariate shift.

    ``x_tr ~ N(0, 5)``, ``x_te ~ N(-5, 0.5)`` (second argument is the
    variance), ``y = x**2 + N(0, 5)`` noise.

    Returns
    -------
    train, test : Dataset
    dp : DensityPair
        The two Gaussian input densities.
    """
    if n_tr < 1 or n_te < 1:
        raise ValueError("sample sizes must be positive")
    rng = np.random.default_rng(seed)
    x_tr = rng.normal(SYNTH_TRAIN_MEAN, np.sqrt(SYNTH_TRAIN_VAR), n_tr)
    x_te = rng.normal(SYNTH_TEST_MEAN, np.sqrt(SYNTH_TEST_VAR), n_te)
    y_tr = x_tr**2 + rng.normal(0.0, np.sqrt(SYNTH_NOISE_VAR), n_tr)
    y_te = x_te**2 + rng.normal(0.0, np.sqrt(SYNTH_NOISE_VAR), n_te)
    meta = {"source": "synth", "seed": seed}
    train = Dataset(x_tr.reshape(-1, 1), y_tr, "regression", dict(meta, split="train"))
    test = Dataset(x_te.reshape(-1, 1), y_te, "regression", dict(meta, split="test"))
    return train, test, synth_density_pair()
