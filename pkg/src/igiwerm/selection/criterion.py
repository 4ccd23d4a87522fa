"""Information criterion for importance-weighted maximum likelihood.

    IC = -2 L1(theta_w) + 2 tr(J_w H_w^{-1})

``theta_w`` maximizes the ``(lam, alpha)``-weighted log-likelihood,
``L1 = sum_i r_i log p(y_i | x_i, theta)`` with ``r = p_te / p_tr``, and the
penalty uses plug-in sample moments

    J_w = sum_i r_i w_i s_i s_i^T          (s_i: per-sample score)
    H_w = -sum_i w_i d^2 log p_i / dtheta^2

(the 1/n factors cancel in the trace).  :func:`ic_gw_general` works for any
model given per-sample callbacks; :func:`ic_gw_linear` is the closed form
for normal linear regression with parameters ``(beta, sigma^2)``.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit, log_expit

from .._linalg import cho_solve_lower, cholesky_jitter
from ..errors import FitError, SingularMatrixError
from ..learners import _design, fit_weighted_linear
from ..weights import weights_from_densities


@dataclass(frozen=True)
class LikelihoodModel:
    """Per-sample log-likelihood and its first two derivatives.

    Each callback takes ``(theta, X, y)``; shapes of the results are
    ``(n,)``, ``(n, p)`` and ``(n, p, p)``.
    """

    loglik: Callable
    score: Callable
    hessian: Callable


def _gaussian_loglik(theta, X, y):
    beta, s2 = theta[:-1], theta[-1]
    eps = y - _design(X) @ beta
    return -0.5 * np.log(2 * np.pi * s2) - eps**2 / (2 * s2)


def _gaussian_score(theta, X, y):
    A = _design(X)
    beta, s2 = theta[:-1], theta[-1]
    eps = y - A @ beta
    return np.hstack([A * (eps / s2)[:, None], ((eps**2 / s2 - 1) / (2 * s2))[:, None]])


def _gaussian_hessian(theta, X, y):
    A = _design(X)
    beta, s2 = theta[:-1], theta[-1]
    eps = y - A @ beta
    n, k = A.shape
    H = np.zeros((n, k + 1, k + 1))
    H[:, :k, :k] = -A[:, :, None] * A[:, None, :] / s2
    cross = -A * (eps / s2**2)[:, None]
    H[:, :k, k] = cross
    H[:, k, :k] = cross
    H[:, k, k] = 1 / (2 * s2**2) - eps**2 / s2**3
    return H


GAUSSIAN_LINEAR = LikelihoodModel(_gaussian_loglik, _gaussian_score, _gaussian_hessian)


def _logistic_loglik(theta, X, y):
    return log_expit(y * (_design(X) @ theta))


def _logistic_score(theta, X, y):
    A = _design(X)
    s = expit(-y * (A @ theta))
    return A * (y * s)[:, None]


def _logistic_hessian(theta, X, y):
    A = _design(X)
    p = expit(A @ theta)
    return -(p * (1 - p))[:, None, None] * A[:, :, None] * A[:, None, :]


LOGISTIC = LikelihoodModel(_logistic_loglik, _logistic_score, _logistic_hessian)


def fit_gaussian_linear(train, weights):
    """Weighted MLE ``(beta_0, beta..., sigma^2)`` of the normal linear model."""
    model = fit_weighted_linear(train, weights)
    beta = np.concatenate([[model.intercept], model.coefficients])
    eps = train.y - _design(train.X) @ beta
    w = np.asarray(weights, dtype=float)
    s2 = float(np.dot(w, eps**2) / w.sum())
    if not s2 > 0:
        raise FitError("weighted residual variance is zero")
    return np.concatenate([beta, [s2]])


def ic_gw_general(model, theta, train, dp, wp, grad_tol=1e-6):
    """Plug-in ``-2 L1 + 2 tr(J_w H_w^{-1})`` at the supplied parameters.

    ``theta`` must be a stationary point of the weighted log-likelihood:
    if ``|sum_i w_i s_i| > grad_tol * sum_i w_i |s_i|`` a :class:`FitError`
    is raised.
    """
    ptr, pte = dp.evaluate(train.X)
    ratio = pte / ptr
    w = weights_from_densities(ptr, pte, wp)
    theta = np.asarray(theta, dtype=float)
    ll = model.loglik(theta, train.X, train.y)
    S = model.score(theta, train.X, train.y)
    Hs = model.hessian(theta, train.X, train.y)

    g = w @ S
    scale = np.dot(w, np.linalg.norm(S, axis=1))
    if np.linalg.norm(g) > grad_tol * max(scale, np.finfo(float).tiny):
        raise FitError(
            f"theta is not the weighted maximizer (|gradient| = {np.linalg.norm(g):.3g})"
        )
    J = (S * (ratio * w)[:, None]).T @ S
    H = -np.einsum("i,ijk->jk", w, Hs)
    try:
        L, _ = cholesky_jitter(0.5 * (H + H.T))
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"weighted Hessian is singular: {exc}") from None
    penalty = np.trace(cho_solve_lower(L, J))
    return float(-2.0 * np.dot(ratio, ll) + 2.0 * penalty)


def ic_gw_linear(train, dp, wp):
    """Closed-form criterion for normal linear regression.

    With ``w`` the ``(lam, alpha)`` weights, ``r`` the density ratio,
    ``eps`` the residuals of the ``w``-weighted least-squares fit,
    ``c = sum w``, ``sigma^2 = sum w eps^2 / c``, ``z = eps^2 / sigma^2`` and
    ``h`` the diagonal of ``X (X^T W X)^{-1} X^T W``::

        IC = sum r (z + log(2 pi sigma^2))
             + 2 sum r (z h + w / (2c) (z - 1)^2)
    """
    ptr, pte = dp.evaluate(train.X)
    ratio = pte / ptr
    w = weights_from_densities(ptr, pte, wp)
    fitted = fit_weighted_linear(train, w)
    A = _design(train.X)
    eps = train.y - (A[:, 1:] @ fitted.coefficients + fitted.intercept)
    c = w.sum()
    s2 = float(np.dot(w, eps**2) / c)
    if not s2 > 0:
        raise FitError("weighted residual variance is zero")
    G = (A * w[:, None]).T @ A
    L, _ = cholesky_jitter(G)
    h = w * np.einsum("ij,ji->i", A, cho_solve_lower(L, A.T))
    z = eps**2 / s2
    neg2_loglik = np.dot(ratio, z + np.log(2 * np.pi * s2))
    penalty = np.dot(ratio, z * h + w / (2 * c) * (z - 1) ** 2)
    return float(neg2_loglik + 2.0 * penalty)
