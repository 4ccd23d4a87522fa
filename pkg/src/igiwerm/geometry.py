"""Power/log means, alpha-divergence and alpha-geodesics.

Everything here works elementwise on numpy arrays (scalar ``alpha`` and
``lam``) and returns a Python float when every array argument is scalar.

The generator of the mean family is

    f_alpha(a) = a ** ((1 - alpha) / 2)   for alpha != 1
               = log(a)                   for alpha == 1

and the weighted f-mean ("f-interpolation") of ``a`` and ``b`` at position
``lam`` is ``f_alpha^{-1}((1 - lam) f_alpha(a) + lam f_alpha(b))``.  Special
cases: alpha = -1 arithmetic, 0 squared-root mean, 1 geometric, 3 harmonic.
"""
import numpy as np

from .errors import DomainError

#: Below this distance from alpha = 1 the log/exp branch is used.
LOG_BRANCH_TOL = 1e-8


def _is_log_branch(alpha):
    return abs(alpha - 1.0) < LOG_BRANCH_TOL


def _check_alpha(alpha):
    alpha = float(alpha)
    if not np.isfinite(alpha):
        raise DomainError(f"alpha must be finite, got {alpha}")
    return alpha


def _check_lambda(lam):
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    return lam


def _out(x, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return float(x)
    return x


def _check_positive(a, alpha, name="a"):
    a = np.asarray(a, dtype=float)
    if np.any(~np.isfinite(a)):
        raise DomainError(f"{name} must be finite")
    if np.any(a < 0):
        raise DomainError(f"{name} must be nonnegative")
    if alpha >= 1 and np.any(a == 0):
        raise DomainError(f"{name} = 0 is outside the domain of f_alpha for alpha >= 1")
    return a


def f_alpha(a, alpha):
    """Generator of the alpha power mean.

    ``a = 0`` is accepted only for ``alpha < 1`` (where the value is 0).
    """
    alpha = _check_alpha(alpha)
    arr = _check_positive(a, alpha)
    if _is_log_branch(alpha):
        return _out(np.log(arr), a)
    return _out(np.power(arr, (1.0 - alpha) / 2.0), a)


def f_alpha_inv(v, alpha):
    """Inverse of :func:`f_alpha`."""
    alpha = _check_alpha(alpha)
    arr = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(arr)):
        raise DomainError("v must be finite")
    if _is_log_branch(alpha):
        return _out(np.exp(arr), v)
    if np.any(arr <= 0):
        raise DomainError("f_alpha_inv requires v > 0 when alpha != 1")
    return _out(np.power(arr, 2.0 / (1.0 - alpha)), v)


def log_f_interpolate(log_a, log_b, lam, alpha):
    """``log m_f(a, b)`` computed from log inputs.

    Works in log space, so it neither overflows nor underflows for extreme
    ratios of ``a`` to ``b``.  No endpoint special-casing.
    """
    log_a = np.asarray(log_a, dtype=float)
    log_b = np.asarray(log_b, dtype=float)
    if _is_log_branch(alpha):
        return (1.0 - lam) * log_a + lam * log_b
    e = (1.0 - alpha) / 2.0
    with np.errstate(divide="ignore"):
        la = np.log1p(-lam) if lam < 1 else -np.inf
        lb = np.log(lam) if lam > 0 else -np.inf
    # e * (-inf) for a zero input with e > 0 stays -inf, as intended
    with np.errstate(invalid="ignore"):
        s = np.logaddexp(la + e * log_a, lb + e * log_b)
    return s / e


def f_interpolate(a, b, lam, alpha):
    """Weighted f-mean of ``a`` and ``b`` (f-interpolation).

    Returns ``a`` exactly at ``lam = 0`` and ``b`` exactly at ``lam = 1``.
    The result lies between ``min(a, b)`` and ``max(a, b)`` and is
    nonincreasing in ``alpha``.
    """
    alpha = _check_alpha(alpha)
    lam = _check_lambda(lam)
    a_arr = _check_positive(a, alpha, "a")
    b_arr = _check_positive(b, alpha, "b")
    a_arr, b_arr = np.broadcast_arrays(a_arr, b_arr)
    if lam == 0.0:
        return _out(a_arr.copy(), a, b)
    if lam == 1.0:
        return _out(b_arr.copy(), a, b)
    with np.errstate(divide="ignore"):
        m = np.exp(log_f_interpolate(np.log(a_arr), np.log(b_arr), lam, alpha))
    # clip away last-ulp excursions so the mean stays bracketed
    m = np.clip(m, np.minimum(a_arr, b_arr), np.maximum(a_arr, b_arr))
    return _out(m, a, b)


def _as_prob(p, name):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DomainError(f"{name} must be a nonempty 1-d vector")
    if np.any(~np.isfinite(p)) or np.any(p < 0):
        raise DomainError(f"{name} must have finite nonnegative entries")
    if abs(p.sum() - 1.0) > 1e-12:
        raise DomainError(f"{name} must sum to 1 (got {p.sum():.17g})")
    return p


def alpha_divergence(p, q, alpha):
    """Alpha-divergence between two probability vectors.

    ``D = 4 / (1 - alpha^2) * (1 - sum p^((1-alpha)/2) q^((1+alpha)/2))``.
    The Kullback-Leibler limits ``alpha = +-1`` are rejected.
    """
    alpha = _check_alpha(alpha)
    p = _as_prob(p, "p")
    q = _as_prob(q, "q")
    if p.shape != q.shape:
        raise DomainError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    if abs(abs(alpha) - 1.0) < LOG_BRANCH_TOL:
        raise DomainError("alpha = +-1 (KL limit) is not supported")
    ep = (1.0 - alpha) / 2.0
    eq = (1.0 + alpha) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.power(p, ep) * np.power(q, eq)
    # 0**negative = inf times 0 gives nan: the term is undefined, not zero
    if np.any(~np.isfinite(terms)):
        raise DomainError("zero entries make the divergence infinite for this alpha")
    d = 4.0 / (1.0 - alpha * alpha) * (1.0 - terms.sum())
    # rounding can leave -1e-17 for identical inputs
    return max(float(d), 0.0) if d > -1e-12 else float(d)


def alpha_geodesic_point(p, q, lam, alpha):
    """Point at ``lam`` on the normalized alpha-geodesic from ``p`` to ``q``.

    Componentwise f-interpolation, then division by the total mass.
    """
    alpha = _check_alpha(alpha)
    lam = _check_lambda(lam)
    p = _as_prob(p, "p")
    q = _as_prob(q, "q")
    if p.shape != q.shape:
        raise DomainError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    if lam == 0.0:
        return p.copy()
    if lam == 1.0:
        return q.copy()
    r = f_interpolate(p, q, lam, alpha)
    total = r.sum()
    if total <= 0:
        raise DomainError("interpolated measure has zero mass")
    return r / total
