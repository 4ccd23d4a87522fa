import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igiwerm.errors import DomainError
from igiwerm.geometry import (
    alpha_divergence,
    alpha_geodesic_point,
    f_alpha,
    f_alpha_inv,
    f_interpolate,
)

pos = st.floats(1e-6, 1e6)
lams = st.floats(0.0, 1.0)
alphas = st.floats(-3.0, 3.0)


def oracle_interp(a, b, lam, alpha):
    # straight from the definition, in 50-digit arithmetic
    mpmath.mp.dps = 50
    a, b, lam, alpha = map(mpmath.mpf, (a, b, lam, alpha))
    if alpha == 1:
        return float(mpmath.exp((1 - lam) * mpmath.log(a) + lam * mpmath.log(b)))
    e = (1 - alpha) / 2
    return float(((1 - lam) * a**e + lam * b**e) ** (1 / e))


@pytest.mark.parametrize(
    "a, alpha, want",
    [(2.0, -1.0, 2.0), (4.0, 3.0, 0.25), (math.e, 1.0, 1.0)],
)
def test_f_alpha_examples(a, alpha, want):
    assert f_alpha(a, alpha) == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize(
    "v, alpha, want",
    [(0.25, 3.0, 4.0), (1.0, 1.0, math.e), (3.0, -1.0, 3.0)],
)
def test_f_alpha_inv_examples(v, alpha, want):
    assert f_alpha_inv(v, alpha) == pytest.approx(want, rel=1e-15)


def test_f_alpha_domain():
    with pytest.raises(DomainError):
        f_alpha(-1.0, 0.0)
    with pytest.raises(DomainError):
        f_alpha(0.0, 1.0)
    with pytest.raises(DomainError):
        f_alpha(0.0, 2.0)
    assert f_alpha(0.0, 0.5) == 0.0
    with pytest.raises(DomainError):
        f_alpha_inv(0.0, 2.0)
    with pytest.raises(DomainError):
        f_alpha_inv(-1.0, 0.0)
    with pytest.raises(DomainError):
        f_alpha(1.0, float("nan"))


def test_round_trip_grid():
    a = np.logspace(-6, 6, 49)
    for alpha in np.linspace(-3, 3, 25):
        back = f_alpha_inv(f_alpha(a, alpha), alpha)
        np.testing.assert_allclose(back, a, rtol=1e-12)


def test_f_alpha_monotone():
    a = np.logspace(-3, 3, 100)
    for alpha in (-2.0, 0.0, 1.0, 2.0, 3.0):
        d = np.diff(f_alpha(a, alpha))
        assert np.all(d > 0) or np.all(d < 0)


@pytest.mark.parametrize(
    "a, b, lam, alpha, want",
    [
        (1, 3, 0.5, -1, 2.0),
        (1, 4, 0.5, 1, 2.0),
        (1, 3, 0.5, 3, 1.5),
        (1, 4, 0.5, 0, 2.25),
        (5, 7, 0.0, 2.37, 5.0),
    ],
)
def test_f_interpolate_examples(a, b, lam, alpha, want):
    assert f_interpolate(a, b, lam, alpha) == pytest.approx(want, rel=1e-14)


@settings(max_examples=300, deadline=None)
@given(pos, pos, lams, alphas)
def test_f_interpolate_matches_oracle(a, b, lam, alpha):
    assert f_interpolate(a, b, lam, alpha) == pytest.approx(oracle_interp(a, b, lam, alpha), rel=1e-10)


@settings(max_examples=300, deadline=None)
@given(pos, pos, alphas)
def test_endpoints_exact(a, b, alpha):
    assert f_interpolate(a, b, 0.0, alpha) == a
    assert f_interpolate(a, b, 1.0, alpha) == b


@settings(max_examples=300, deadline=None)
@given(pos, pos, lams, alphas)
def test_bracketing(a, b, lam, alpha):
    m = f_interpolate(a, b, lam, alpha)
    assert min(a, b) <= m <= max(a, b)


@settings(max_examples=200, deadline=None)
@given(pos, pos, lams)
def test_continuity_at_one(a, b, lam):
    m1 = f_interpolate(a, b, lam, 1.0)
    for alpha in (1 - 1e-7, 1 + 1e-7):
        assert abs(f_interpolate(a, b, lam, alpha) - m1) <= 1e-5 * m1


def test_alpha_monotone():
    rng = np.random.default_rng(3)
    alphas_ = np.linspace(-3, 3, 61)
    for _ in range(100):
        a, b = np.exp(rng.uniform(-3, 3, 2))
        if abs(math.log(a / b)) < 0.05:
            continue
        lam = rng.uniform(0.05, 0.95)
        vals = np.array([f_interpolate(a, b, lam, al) for al in alphas_])
        assert np.all(np.diff(vals) < 0)


def test_f_interpolate_vectorized():
    a = np.array([1.0, 1.0, 1.0])
    b = np.array([3.0, 4.0, 3.0])
    out = f_interpolate(a, b, 0.5, -1.0)
    np.testing.assert_allclose(out, [2.0, 2.5, 2.0])


def test_f_interpolate_bad_lambda():
    with pytest.raises(DomainError):
        f_interpolate(1.0, 2.0, 1.5, 0.0)
    with pytest.raises(DomainError):
        f_interpolate(-1.0, 2.0, 0.5, 0.0)


def test_divergence_examples():
    assert alpha_divergence([0.3, 0.7], [0.3, 0.7], 0.0) == pytest.approx(0.0, abs=1e-15)
    assert alpha_divergence([1.0, 0.0], [0.5, 0.5], 0.0) == pytest.approx(4 * (1 - math.sqrt(0.5)), rel=1e-12)
    p, q = [0.2, 0.8], [0.6, 0.4]
    assert abs(alpha_divergence(p, q, 0.5) - alpha_divergence(q, p, -0.5)) <= 1e-12


def _dirichlet_pairs(n, k, seed):
    rng = np.random.default_rng(seed)
    return rng.dirichlet(np.ones(k), n), rng.dirichlet(np.ones(k), n)


def test_divergence_random_pairs():
    P, Q = _dirichlet_pairs(1000, 5, 11)
    rng = np.random.default_rng(12)
    for p, q, alpha in zip(P, Q, rng.uniform(-0.95, 0.95, 1000)):
        d = alpha_divergence(p, q, alpha)
        assert d >= -1e-12
        assert d == pytest.approx(alpha_divergence(q, p, -alpha), rel=1e-10, abs=1e-12)
        # direct evaluation of the defining sum
        s = np.sum(p ** ((1 - alpha) / 2) * q ** ((1 + alpha) / 2))
        assert d == pytest.approx(4 / (1 - alpha**2) * (1 - s), rel=1e-10, abs=1e-12)


def test_divergence_errors():
    with pytest.raises(DomainError):
        alpha_divergence([0.5, 0.5], [0.5, 0.5], 1.0)
    with pytest.raises(DomainError):
        alpha_divergence([0.5, 0.5], [0.5, 0.5], -1.0)
    with pytest.raises(DomainError):
        alpha_divergence([0.5, 0.5], [0.2, 0.3, 0.5], 0.0)
    with pytest.raises(DomainError):
        alpha_divergence([0.5, 0.6], [0.5, 0.5], 0.0)
    with pytest.raises(DomainError):
        alpha_divergence([1.2, -0.2], [0.5, 0.5], 0.0)


def test_geodesic_examples():
    p, q = np.array([0.5, 0.5]), np.array([0.9, 0.1])
    np.testing.assert_array_equal(alpha_geodesic_point(p, q, 0.0, 2.2), p)
    np.testing.assert_array_equal(alpha_geodesic_point(p, q, 1.0, 2.2), q)
    np.testing.assert_allclose(alpha_geodesic_point(p, q, 0.5, -1.0), [0.7, 0.3], rtol=1e-14)
    r = np.sqrt(p * q)
    np.testing.assert_allclose(alpha_geodesic_point(p, q, 0.5, 1.0), r / r.sum(), rtol=1e-14)
    np.testing.assert_allclose(alpha_geodesic_point(p, q, 0.5, 1.0), [0.75, 0.25], rtol=1e-14)


def test_geodesic_normalization():
    P, Q = _dirichlet_pairs(500, 6, 21)
    rng = np.random.default_rng(22)
    for p, q in zip(P, Q):
        lam, alpha = rng.uniform(0, 1), rng.uniform(-3, 3)
        g = alpha_geodesic_point(p, q, lam, alpha)
        assert abs(g.sum() - 1.0) <= 1e-12
        assert np.all(g >= 0)


def test_geodesic_zero_component():
    # zeros are fine below alpha = 1 and rejected at or above it
    p, q = [1.0, 0.0], [0.5, 0.5]
    g = alpha_geodesic_point(p, q, 0.5, 0.0)
    assert g.sum() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        alpha_geodesic_point(p, q, 0.5, 1.0)
