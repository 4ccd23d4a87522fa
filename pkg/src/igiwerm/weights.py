"""The (lambda, alpha) importance-weight family.

For training density ``p_tr`` and test density ``p_te`` the weight of a point
is the f-interpolation of the two densities divided by ``p_tr``:

    w(x) = m_f^(lam, alpha)(p_tr(x), p_te(x)) / p_tr(x)

lam = 0 gives unit weights (plain ERM), lam = 1 the density ratio (IWERM),
alpha = 1 the flattened ratio ``r ** lam`` (AIWERM) and alpha = 3 the
relative ratio ``r / ((1 - lam) r + lam)`` (RIWERM).
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, SupportError
from .geometry import LOG_BRANCH_TOL, f_interpolate, log_f_interpolate

#: Densities at or below this value are treated as support violations.
MIN_DENSITY = 1e-300


@dataclass(frozen=True)
class WeightParams:
    """Coordinates ``(lam, alpha)`` of the weight family."""

    lam: float
    alpha: float

    def __post_init__(self):
        lam, alpha = float(self.lam), float(self.alpha)
        if not 0.0 <= lam <= 1.0:
            raise DomainError(f"lambda must lie in [0, 1], got {lam}")
        if not np.isfinite(alpha):
            raise DomainError(f"alpha must be finite, got {alpha}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "alpha", alpha)

    def as_dict(self):
        return {"lambda": self.lam, "alpha": self.alpha}


ERM = WeightParams(0.0, 1.0)
IWERM = WeightParams(1.0, 1.0)


def aiwerm(lam):
    return WeightParams(lam, 1.0)


def riwerm(lam):
    return WeightParams(lam, 3.0)


@dataclass(frozen=True)
class DensityPair:
    """Training and test input densities.

    Both callables take an ``(n, d)`` array and return ``n`` densities.  They
    need not be normalized; only ratios and interpolations of the pair are
    used downstream.
    """

    p_tr: Callable[[np.ndarray], np.ndarray]
    p_te: Callable[[np.ndarray], np.ndarray]

    def evaluate(self, X):
        """Return ``(p_tr(X), p_te(X))`` after checking the support condition.

        Raises
        ------
        SupportError
            If either density is ``<= MIN_DENSITY`` (or non-finite) at some
            row; ``err.index`` is the first offending row.
        """
        X = _as_matrix(X)
        ptr = np.asarray(self.p_tr(X), dtype=float).reshape(-1)
        pte = np.asarray(self.p_te(X), dtype=float).reshape(-1)
        if ptr.shape[0] != X.shape[0] or pte.shape[0] != X.shape[0]:
            raise ValueError("density callbacks must return one value per row")
        for name, p in (("p_tr", ptr), ("p_te", pte)):
            bad = ~(np.isfinite(p) & (p > MIN_DENSITY))
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise SupportError(
                    f"{name} = {p[i]:.3g} at row {i} violates the support condition",
                    index=i,
                )
        return ptr, pte

    def ratio(self, X):
        """Density ratio ``p_te / p_tr`` at the rows of ``X``."""
        ptr, pte = self.evaluate(X)
        return pte / ptr


def _as_matrix(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d feature matrix, got shape {X.shape}")
    return X


def generalized_weight(dp, x, wp):
    """Weight of a single feature vector ``x``."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(batch_weights(dp, x, wp)[0])


def batch_weights(dp, X, wp):
    """Weights for every row of ``X``.

    Raises :class:`SupportError` carrying the offending row index when a
    density vanishes.
    """
    ptr, pte = dp.evaluate(X)
    return weights_from_densities(ptr, pte, wp)


def weights_from_densities(ptr, pte, wp):
    """``m_f(p_tr, p_te) / p_tr`` from already-evaluated densities."""
    ptr = np.asarray(ptr, dtype=float)
    pte = np.asarray(pte, dtype=float)
    if np.any(~(ptr > MIN_DENSITY)) or np.any(~(pte > MIN_DENSITY)):
        i = int(np.flatnonzero(~((ptr > MIN_DENSITY) & (pte > MIN_DENSITY)))[0])
        raise SupportError(f"density vanishes at row {i}", index=i)
    if wp.lam == 0.0:
        return np.ones_like(ptr)
    return f_interpolate(ptr, pte, wp.lam, wp.alpha) / ptr


def weight_from_ratio(r, wp):
    """Weight as a function of the density ratio ``r = p_te / p_tr`` alone.

    ``[1 - lam + lam * r**((1-alpha)/2)] ** (2/(1-alpha))``, or ``r**lam`` at
    alpha = 1, evaluated in log space.  Accepts scalars or arrays.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r_arr)) or np.any(r_arr <= 0):
        raise DomainError("density ratio must be finite and positive")
    lam, alpha = wp.lam, wp.alpha
    if lam == 0.0:
        out = np.ones_like(r_arr)
    elif lam == 1.0:
        out = r_arr.copy()
    elif abs(alpha - 1.0) < LOG_BRANCH_TOL:
        out = np.exp(lam * np.log(r_arr))
    else:
        out = np.exp(log_f_interpolate(0.0, np.log(r_arr), lam, alpha))
    return float(out) if np.ndim(r) == 0 else out
