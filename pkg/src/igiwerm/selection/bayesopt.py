"""Gaussian-process Bayesian optimization over ``(lam, alpha)``.

Inputs live on the unit square (see :meth:`SearchBox.to_unit`).  The
surrogate uses a squared-exponential kernel with fixed hyperparameters:
length-scale 0.2 per dimension, signal variance equal to the variance of
the observed losses (floor 1e-12), noise variance 1e-6 times the signal
variance, and a constant prior mean equal to the mean observed loss.
Acquisition is expected improvement for *minimization*.
"""
import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_triangular
from scipy.stats import norm

from .._linalg import cho_solve_lower, cholesky_jitter
from ..errors import IgiwermError
from .base import SearchBox, SelectionResult, best_of

log = logging.getLogger(__name__)

DEFAULT_LENGTH_SCALE = (0.2, 0.2)
SIGNAL_FLOOR = 1e-12
NOISE_RATIO = 1e-6


def se_kernel(A, B, length_scale, signal_variance):
    A = np.atleast_2d(A) / np.asarray(length_scale)
    B = np.atleast_2d(B) / np.asarray(length_scale)
    d2 = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2 * A @ B.T
    return signal_variance * np.exp(-0.5 * np.maximum(d2, 0.0))


@dataclass(frozen=True)
class GpState:
    """Immutable GP posterior over normalized ``(lam, alpha)``.

    ``signal_variance`` / ``noise_variance`` left as ``None`` are derived
    from the observed losses each time the state is rebuilt.  Non-finite
    losses are stored as observed but enter the surrogate as the worst
    finite loss.
    """

    points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    losses: np.ndarray = field(default_factory=lambda: np.empty(0))
    length_scale: tuple = DEFAULT_LENGTH_SCALE
    signal_variance: float = None
    noise_variance: float = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        ys = np.asarray(self.losses, dtype=float).reshape(-1)
        if pts.shape[0] != ys.shape[0]:
            raise ValueError("points and losses differ in length")
        if np.any((pts < 0) | (pts > 1)):
            raise ValueError("GP inputs must lie in the unit square")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "losses", ys)
        self._factorize()

    def _factorize(self):
        ys = self.losses
        finite = np.isfinite(ys)
        if ys.size and not finite.all():
            fill = ys[finite].max() if finite.any() else 0.0
            ys = np.where(finite, ys, fill)
        if self.signal_variance is not None:
            sv = float(self.signal_variance)
        else:
            sv = max(float(ys.var()) if ys.size else 1.0, SIGNAL_FLOOR)
        nv = float(self.noise_variance) if self.noise_variance is not None else NOISE_RATIO * sv
        if not (sv > 0 and nv > 0):
            raise ValueError("signal and noise variances must be positive")
        mean = float(ys.mean()) if ys.size else 0.0
        chol = alpha = None
        if ys.size:
            K = se_kernel(self.points, self.points, self.length_scale, sv)
            K[np.diag_indices_from(K)] += nv
            chol, _ = cholesky_jitter(K)
            alpha = cho_solve_lower(chol, ys - mean)
        object.__setattr__(self, "_signal", sv)
        object.__setattr__(self, "_noise", nv)
        object.__setattr__(self, "_mean", mean)
        object.__setattr__(self, "_chol", chol)
        object.__setattr__(self, "_alpha", alpha)

    @property
    def prior_mean(self):
        return self._mean

    @property
    def signal(self):
        return self._signal


def gp_update(state, point, loss):
    """New state with one more observation."""
    point = np.asarray(point, dtype=float).reshape(1, 2)
    return replace(
        state,
        points=np.vstack([state.points, point]),
        losses=np.append(state.losses, float(loss)),
    )


def gp_posterior_batch(state, points):
    """Posterior means and standard deviations at each row of ``points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if state._chol is None:
        return np.full(P.shape[0], state._mean), np.full(P.shape[0], np.sqrt(state._signal))
    Ks = se_kernel(P, state.points, state.length_scale, state._signal)
    mu = state._mean + Ks @ state._alpha
    V = solve_triangular(state._chol, Ks.T, lower=True)
    var = state._signal - (V * V).sum(0)
    return mu, np.sqrt(np.maximum(var, 0.0))


def gp_posterior(state, point):
    """``(mean, std)`` of the posterior at one normalized point."""
    mu, sd = gp_posterior_batch(state, np.asarray(point, dtype=float).reshape(1, 2))
    return float(mu[0]), float(sd[0])


def expected_improvement_values(mu, sigma, incumbent):
    """Vectorized EI for minimization: ``(L - mu) Phi(Z) + sigma phi(Z)``.

    Where ``sigma == 0`` this is the limit ``max(L - mu, 0)``.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    gap = incumbent - mu
    safe = np.where(sigma > 0, sigma, 1.0)
    z = gap / safe
    ei = gap * norm.cdf(z) + sigma * norm.pdf(z)
    return np.where(sigma > 0, np.maximum(ei, 0.0), np.maximum(gap, 0.0))


def expected_improvement(state, point, incumbent_loss):
    """Expected improvement below ``incumbent_loss`` at one normalized point.

    Zero when the posterior is certain and not below the incumbent.
    """
    mu, sd = gp_posterior(state, point)
    return float(expected_improvement_values(mu, sd, incumbent_loss))


def initial_design(n_init, rng):
    """The four corners and the center of the unit square, then uniform
    random points if ``n_init > 5``."""
    base = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [0.5, 0.5]])
    if n_init <= 5:
        return base[:n_init]
    return np.vstack([base, rng.random((n_init - 5, 2))])


def _refine(f, X, step=0.005, min_step=1e-4):
    """Coordinate ascent on ``f`` inside the unit square, run for every row
    of ``X`` at once.  ``f`` maps an ``(m, 2)`` array to ``m`` values.

    Each start keeps its own step, halved whenever none of the four axis
    moves improves it.
    """
    X = np.array(X, dtype=float)
    best = f(X)
    steps = np.full(X.shape[0], float(step))
    moves = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    while np.any(steps >= min_step):
        live = np.flatnonzero(steps >= min_step)
        cand = np.clip(X[live, None, :] + steps[live, None, None] * moves[None], 0.0, 1.0)
        vals = f(cand.reshape(-1, 2)).reshape(live.size, 4)
        k = np.argmax(vals, axis=1)
        gain = vals[np.arange(live.size), k]
        up = gain > best[live]
        X[live[up]] = cand[up, k[up]]
        best[live[up]] = gain[up]
        steps[live[~up]] *= 0.5
    return X, best


def propose(state, incumbent, grid_size=101, n_refine=20):
    """Maximize EI on a ``grid_size``-square lattice, then polish the best
    ``n_refine`` lattice points by coordinate ascent."""
    g = np.linspace(0.0, 1.0, grid_size)
    U, V = np.meshgrid(g, g, indexing="ij")
    cand = np.column_stack([U.ravel(), V.ravel()])
    mu, sd = gp_posterior_batch(state, cand)
    ei = expected_improvement_values(mu, sd, incumbent)
    order = np.argsort(-ei, kind="stable")[:n_refine]

    def f(P):
        m, s = gp_posterior_batch(state, P)
        return expected_improvement_values(m, s, incumbent)

    xs, vals = _refine(f, cand[order])
    i = int(np.argmax(vals))  # first of equals: best lattice rank wins ties
    best_x, best_v = xs[i], vals[i]
    if best_v <= 0 or _seen(state.points, best_x):
        # flat acquisition: fall back to the unexplored lattice point farthest from data
        d = np.min(((cand[:, None, :] - state.points[None]) ** 2).sum(-1), axis=1)
        best_x = cand[int(np.argmax(d))]
    return best_x


def _seen(points, x, tol=1e-9):
    return points.size > 0 and np.min(np.abs(points - x).sum(1)) < tol


def bayes_opt(objective, box=None, n_init=5, n_iter=20, seed=0, length_scale=DEFAULT_LENGTH_SCALE):
    """Minimize ``objective(WeightParams) -> loss`` over ``box``.

    Runs exactly ``n_init + n_iter`` evaluations.  An evaluation that raises
    a package error or returns a non-finite value is recorded with loss
    ``+inf`` and never becomes the incumbent.
    """
    if n_init < 2:
        raise ValueError("n_init must be at least 2")
    if n_iter < 0:
        raise ValueError("n_iter must be nonnegative")
    box = box or SearchBox()
    rng = np.random.default_rng(seed)
    history = []
    state = GpState(length_scale=length_scale)

    def evaluate(u):
        wp = box.from_unit(u)
        try:
            loss = float(objective(wp))
        except (IgiwermError, np.linalg.LinAlgError, ValueError) as exc:
            log.debug("objective failed at %s: %s", wp, exc)
            loss = np.inf
        if not np.isfinite(loss):
            loss = np.inf
        history.append((wp, loss))
        return loss

    for u in initial_design(n_init, rng):
        state = gp_update(state, u, evaluate(u))
    for _ in range(n_iter):
        finite = state.losses[np.isfinite(state.losses)]
        incumbent = float(finite.min()) if finite.size else 0.0
        u = propose(state, incumbent)
        state = gp_update(state, u, evaluate(u))

    wp, loss = best_of(history)
    return SelectionResult(wp, loss, history)
