"""Weighted empirical risk minimizers.

* weighted least squares (closed form),
* weighted logistic regression (damped Newton),
* weighted RBF kernel ridge, used as a closed-form stand-in for an RBF SVM.

Each ``fit_weighted_*`` takes raw per-sample weights; the scale of the
weights is left alone (for kernel ridge it interacts with ``ridge``).
:func:`fit` dispatches on a :class:`LearnerConfig` and can optionally
normalize the weights to mean one first.
"""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist
from scipy.special import expit, log_expit

from ._linalg import cho_solve_lower, cholesky_jitter
from .errors import ConvergenceError, FitError, SeparationError, SingularMatrixError

MIN_WEIGHT = 1e-12


@dataclass(frozen=True)
class LinearModel:
    coefficients: np.ndarray
    intercept: float

    def decision_function(self, X):
        return np.asarray(X, dtype=float) @ self.coefficients + self.intercept

    predict = decision_function


@dataclass(frozen=True)
class KernelModel:
    support_points: np.ndarray
    dual_coefficients: np.ndarray
    bandwidth: float
    ridge: float

    def decision_function(self, X):
        K = rbf_kernel(np.asarray(X, dtype=float), self.support_points, self.bandwidth)
        return K @ self.dual_coefficients

    predict = decision_function


def _check_weights(weights, n):
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.shape[0] != n:
        raise ValueError(f"expected {n} weights, got {w.shape[0]}")
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and nonnegative")
    if not np.any(w > 0):
        raise FitError("all weights are zero")
    return w


def _design(X):
    X = np.asarray(X, dtype=float)
    return np.hstack([np.ones((X.shape[0], 1)), X])


def fit_weighted_linear(data, weights):
    """Minimize ``sum_i w_i (y_i - b0 - b.x_i)^2``.

    Raises :class:`SingularMatrixError` if the weighted design (with an
    intercept column) is rank deficient.
    """
    w = _check_weights(weights, data.n)
    A = _design(data.X)
    sw = np.sqrt(w)
    As = A * sw[:, None]
    if np.linalg.matrix_rank(As) < A.shape[1]:
        raise SingularMatrixError("weighted design matrix is rank deficient")
    # least squares on the sqrt-weighted system avoids squaring the condition number
    beta, *_ = np.linalg.lstsq(As, data.y * sw, rcond=None)
    return LinearModel(beta[1:].copy(), float(beta[0]))


def logistic_objective(params, X, y, weights):
    """Weighted mean negative log-likelihood of a logistic model.

    ``params = (intercept, coef...)``; returns ``(value, gradient, hessian)``
    of ``sum_i w_i log(1 + exp(-y_i f_i)) / sum_i w_i``.
    """
    A = _design(X)
    w = np.asarray(weights, dtype=float)
    wn = w / w.sum()
    margin = y * (A @ params)
    value = -np.dot(wn, log_expit(margin))
    s = expit(-margin)
    grad = -A.T @ (wn * y * s)
    curv = wn * s * (1.0 - s)
    hess = (A * curv[:, None]).T @ A
    return value, grad, hess


def fit_weighted_logistic(data, weights, tol=1e-8, max_iter=100, max_norm=1e6):
    """Damped Newton for weighted logistic regression, starting at zero.

    Converged when the gradient of :func:`logistic_objective` has Euclidean
    norm ``<= tol``.

    Raises
    ------
    SeparationError
        If the parameter norm exceeds ``max_norm``, or the returned
        parameters classify every positively weighted point correctly (the
        infimum is then approached only as the norm grows without bound;
        the gradient test alone can pass at a modest norm).
    ConvergenceError
        After ``max_iter`` iterations without convergence.
    """
    w = _check_weights(weights, data.n)
    X, y = data.X, data.y
    params = np.zeros(data.d + 1)
    value, grad, hess = logistic_objective(params, X, y, w)
    gnorm = np.linalg.norm(grad)

    def done(params):
        if np.all(y[w > 0] * (_design(X[w > 0]) @ params) > 0):
            raise SeparationError("weighted data are linearly separable; the MLE does not exist")
        return LinearModel(params[1:].copy(), float(params[0]))

    for _ in range(max_iter):
        if gnorm <= tol:
            return done(params)
        try:
            L, _ = cholesky_jitter(hess)
            step = cho_solve_lower(L, grad)
        except SingularMatrixError:
            step = grad
        t = 1.0
        while True:
            cand = params - t * step
            cval, cgrad, chess = logistic_objective(cand, X, y, w)
            if cval <= value + 1e-4 * t * np.dot(grad, -step) or t < 1e-10:
                break
            t *= 0.5
        params, value, grad, hess = cand, cval, cgrad, chess
        gnorm = np.linalg.norm(grad)
        if np.linalg.norm(params) > max_norm:
            raise SeparationError(
                f"parameter norm exceeded {max_norm:g}; data are separable under these weights"
            )
    if gnorm <= tol:
        return done(params)
    raise ConvergenceError(
        f"no convergence after {max_iter} Newton steps (gradient norm {gnorm:.3g})",
        grad_norm=gnorm,
    )


def rbf_kernel(A, B, bandwidth):
    """``exp(-|a - b|^2 / (2 h^2))``."""
    d2 = cdist(np.atleast_2d(A), np.atleast_2d(B), "sqeuclidean")
    return np.exp(-d2 / (2.0 * bandwidth * bandwidth))


def median_bandwidth(X):
    """Median pairwise Euclidean distance (1.0 if degenerate)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] < 2:
        return 1.0
    h = float(np.median(pdist(X)))
    return h if h > 0 else 1.0


def fit_weighted_kernel_ridge(data, weights, bandwidth=None, ridge=None):
    """Weighted RBF kernel ridge.

    Solves ``(K + ridge * W^{-1}) a = y`` on the rows whose weight is at least
    ``1e-12``; rows below that are dropped.  Defaults: median-heuristic
    bandwidth, ``ridge = 1e-3 * n``.  The system is solved in the symmetric
    form ``(W^{1/2} K W^{1/2} + ridge I) b = W^{1/2} y``, ``a = W^{1/2} b``.
    """
    w = _check_weights(weights, data.n)
    keep = w >= MIN_WEIGHT
    if not keep.any():
        raise FitError("every weight is below the retention threshold")
    X, y, w = data.X[keep], data.y[keep], w[keep]
    if bandwidth is None:
        bandwidth = median_bandwidth(X)
    if ridge is None:
        ridge = 1e-3 * data.n
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    if not ridge > 0:
        raise ValueError(f"ridge must be positive, got {ridge}")
    K = rbf_kernel(X, X, bandwidth)
    sw = np.sqrt(w)
    M = sw[:, None] * K * sw[None, :]
    M[np.diag_indices_from(M)] += ridge
    L, _ = cholesky_jitter(M)
    b = cho_solve_lower(L, sw * y)
    return KernelModel(X.copy(), sw * b, float(bandwidth), float(ridge))


def predict(model, X):
    """Real-valued model output."""
    return model.decision_function(X)


def _pair(pred, y):
    pred = np.asarray(pred, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if pred.shape != y.shape:
        raise ValueError(f"length mismatch: {pred.shape[0]} predictions, {y.shape[0]} targets")
    return pred, y


def squared_errors(pred, y):
    pred, y = _pair(pred, y)
    return (pred - y) ** 2


def zero_one_errors(pred, y):
    """1 where ``sign(pred)`` disagrees with ``y``; ``sign(0)`` counts as +1."""
    pred, y = _pair(pred, y)
    return (np.where(pred >= 0, 1.0, -1.0) != np.sign(y)).astype(float)


def mse(pred, y):
    return float(squared_errors(pred, y).mean())


def misclassification_rate(pred, y):
    return float(zero_one_errors(pred, y).mean())


@dataclass(frozen=True)
class LearnerConfig:
    """Which learner to fit and how.

    ``kind`` is ``"linear"``, ``"logistic"`` or ``"kernel_ridge"``.
    ``normalize_weights`` rescales weights to mean one before fitting.
    Off by default: the linear and logistic fits do not care, and for kernel
    ridge the raw weights are what ``(K + ridge W^-1) a = y`` refers to.
    """

    kind: str = "linear"
    bandwidth: float = None
    ridge: float = None
    tol: float = 1e-8
    max_iter: int = 100
    normalize_weights: bool = False

    def __post_init__(self):
        if self.kind not in LEARNERS:
            raise ValueError(f"unknown learner {self.kind!r}; choose from {sorted(LEARNERS)}")


LEARNERS = ("linear", "logistic", "kernel_ridge")


def fit(config, data, weights):
    w = np.asarray(weights, dtype=float)
    if config.normalize_weights:
        mean = w.mean()
        if not mean > 0:
            raise FitError("all weights are zero")
        w = w / mean
    if config.kind == "linear":
        return fit_weighted_linear(data, w)
    if config.kind == "logistic":
        return fit_weighted_logistic(data, w, tol=config.tol, max_iter=config.max_iter)
    return fit_weighted_kernel_ridge(data, w, config.bandwidth, config.ridge)


def pointwise_loss(data_task, pred, y):
    """Squared error for regression, 0/1 error for classification."""
    if data_task == "classification":
        return zero_one_errors(pred, y)
    return squared_errors(pred, y)


def metric(data_task, pred, y):
    return float(pointwise_loss(data_task, pred, y).mean())
