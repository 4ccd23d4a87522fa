import numpy as np
import pytest

from igiwerm.data import Dataset
from igiwerm.errors import ConvergenceError, FitError, SeparationError, SingularMatrixError
from igiwerm.learners import (
    LearnerConfig,
    fit,
    fit_weighted_kernel_ridge,
    fit_weighted_linear,
    fit_weighted_logistic,
    logistic_objective,
    median_bandwidth,
    misclassification_rate,
    mse,
    rbf_kernel,
)


def _ols(X, y):
    A = np.column_stack([np.ones(len(X)), X])
    return np.linalg.lstsq(A, y, rcond=None)[0]


def _classification(n, d, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    logits = X @ rng.normal(size=d) + 0.3
    y = np.where(rng.random(n) < 1 / (1 + np.exp(-logits)), 1.0, -1.0)
    return Dataset(X, y, "classification")


def test_linear_exact():
    data = Dataset(np.array([[1.0], [2.0], [3.0]]), np.array([2.0, 4.0, 6.0]))
    for c in (1.0, 0.3, 7.0):
        m = fit_weighted_linear(data, np.full(3, c))
        assert m.coefficients[0] == pytest.approx(2.0, abs=1e-10)
        assert m.intercept == pytest.approx(0.0, abs=1e-10)


def test_linear_uniform_matches_ols():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(40, 3))
    y = rng.normal(size=40)
    m = fit_weighted_linear(Dataset(X, y), np.full(40, 2.5))
    beta = _ols(X, y)
    np.testing.assert_allclose(np.r_[m.intercept, m.coefficients], beta, atol=1e-10)


def test_linear_zero_weight_outlier():
    X = np.arange(6.0).reshape(-1, 1)
    y = 1.0 + 3.0 * X[:, 0]
    y[4] = 100.0
    w = np.ones(6)
    w[4] = 0.0
    m = fit_weighted_linear(Dataset(X, y), w)
    keep = np.arange(6) != 4
    np.testing.assert_allclose(np.r_[m.intercept, m.coefficients], _ols(X[keep], y[keep]), atol=1e-10)


def test_linear_replication_oracle():
    rng = np.random.default_rng(1)
    for _ in range(10):
        X = rng.normal(size=(15, 2))
        y = rng.normal(size=15)
        k = rng.integers(1, 5, 15)
        m = fit_weighted_linear(Dataset(X, y), k.astype(float))
        beta = _ols(np.repeat(X, k, axis=0), np.repeat(y, k))
        np.testing.assert_allclose(np.r_[m.intercept, m.coefficients], beta, atol=1e-9)


def test_linear_residual_orthogonality():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(50, 3))
    y = rng.normal(size=50) * 10
    w = rng.exponential(size=50)
    m = fit_weighted_linear(Dataset(X, y), w)
    A = np.column_stack([np.ones(50), X])
    g = A.T @ (w * (y - m.predict(X)))
    assert np.linalg.norm(g) <= 1e-8 * np.linalg.norm(y)


def test_linear_rank_deficient():
    X = np.column_stack([np.arange(5.0), 2 * np.arange(5.0)])
    with pytest.raises(SingularMatrixError):
        fit_weighted_linear(Dataset(X, np.arange(5.0)), np.ones(5))
    X = np.arange(4.0).reshape(-1, 1)
    with pytest.raises(SingularMatrixError):
        fit_weighted_linear(Dataset(X, np.arange(4.0)), np.array([1.0, 0, 0, 0]))


def test_bad_weights():
    data = Dataset(np.arange(4.0).reshape(-1, 1), np.arange(4.0))
    with pytest.raises(ValueError):
        fit_weighted_linear(data, np.ones(3))
    with pytest.raises(ValueError):
        fit_weighted_linear(data, np.array([1.0, -1, 1, 1]))
    with pytest.raises(FitError):
        fit_weighted_linear(data, np.zeros(4))


def test_logistic_gradient_fd():
    worst = 0.0
    for seed in range(20):
        data = _classification(30, 4, seed)
        rng = np.random.default_rng(100 + seed)
        w = rng.exponential(size=30)
        theta = rng.normal(size=5)
        _, g, H = logistic_objective(theta, data.X, data.y, w)
        h = 1e-6
        fd = np.array([
            (logistic_objective(theta + h * e, data.X, data.y, w)[0]
             - logistic_objective(theta - h * e, data.X, data.y, w)[0]) / (2 * h)
            for e in np.eye(5)
        ])
        worst = max(worst, np.linalg.norm(fd - g) / np.linalg.norm(g))
        fdh = np.array([
            (logistic_objective(theta + h * e, data.X, data.y, w)[1]
             - logistic_objective(theta - h * e, data.X, data.y, w)[1]) / (2 * h)
            for e in np.eye(5)
        ])
        np.testing.assert_allclose(fdh, H, atol=1e-6)
    assert worst <= 1e-5


def test_logistic_symmetric():
    data = Dataset(np.array([[-1.0], [1.0], [-1.0], [1.0]]), np.array([-1.0, 1.0, 1.0, -1.0]), "classification")
    m = fit_weighted_logistic(data, np.ones(4))
    assert abs(m.intercept) <= 1e-6


def test_logistic_converges_and_scale_invariant():
    data = _classification(200, 3, 5)
    w = np.random.default_rng(6).exponential(size=200)
    m1 = fit_weighted_logistic(data, w)
    m2 = fit_weighted_logistic(data, 37.0 * w)
    p = np.r_[m1.intercept, m1.coefficients]
    _, g, _ = logistic_objective(p, data.X, data.y, w)
    assert np.linalg.norm(g) <= 1e-8
    np.testing.assert_allclose(np.r_[m2.intercept, m2.coefficients], p, atol=1e-6)
    # uniform weights give the same argmin as unit weights
    m3 = fit_weighted_logistic(data, np.full(200, 3.0))
    m4 = fit_weighted_logistic(data, np.ones(200))
    np.testing.assert_allclose(m3.coefficients, m4.coefficients, atol=1e-6)


def test_logistic_separable():
    data = Dataset(np.array([[-2.0], [-1.0], [1.0], [2.0]]), np.array([-1.0, -1, 1, 1]), "classification")
    with pytest.raises((SeparationError, ConvergenceError)):
        fit_weighted_logistic(data, np.ones(4))


def test_logistic_max_iter():
    data = _classification(100, 3, 7)
    with pytest.raises(ConvergenceError) as info:
        fit_weighted_logistic(data, np.ones(100), tol=1e-30, max_iter=2)
    assert info.value.grad_norm > 0


def test_krr_single_point():
    data = Dataset(np.array([[0.3, -1.0]]), np.array([2.0]))
    for ridge, w in ((0.5, 1.0), (0.1, 4.0), (1e-9, 2.0)):
        m = fit_weighted_kernel_ridge(data, np.array([w]), bandwidth=1.0, ridge=ridge)
        want = 2.0 * 1.0 / (1.0 + ridge / w)
        assert m.predict(data.X)[0] == pytest.approx(want, rel=1e-12)


def test_krr_uniform_weights():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(30, 2))
    y = np.sin(X[:, 0])
    h, ridge, c = 0.8, 0.3, 2.5
    m = fit_weighted_kernel_ridge(Dataset(X, y), np.full(30, c), h, ridge)
    K = rbf_kernel(X, X, h)
    a = np.linalg.solve(K + (ridge / c) * np.eye(30), y)
    probe = rng.normal(size=(20, 2))
    np.testing.assert_allclose(m.predict(probe), rbf_kernel(probe, X, h) @ a, atol=1e-10)


def test_krr_direct_solve():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(25, 3))
    y = rng.normal(size=25)
    w = rng.exponential(size=25)
    m = fit_weighted_kernel_ridge(Dataset(X, y), w, 1.2, 0.05)
    K = rbf_kernel(X, X, 1.2)
    a = np.linalg.solve(K + 0.05 * np.diag(1 / w), y)
    np.testing.assert_allclose(m.dual_coefficients, a, rtol=1e-8, atol=1e-10)


def test_krr_row_split():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(12, 2))
    y = rng.normal(size=12)
    w = rng.exponential(size=12)
    single = fit_weighted_kernel_ridge(Dataset(X, y), w, 1.0, 0.2)
    Xd = np.vstack([X, X[:1]])
    yd = np.r_[y, y[0]]
    wd = np.r_[w, w[0] / 2]
    wd[0] = w[0] / 2
    double = fit_weighted_kernel_ridge(Dataset(Xd, yd), wd, 1.0, 0.2)
    g = np.linspace(-2, 2, 15)
    probe = np.column_stack([g, g[::-1]])
    np.testing.assert_allclose(double.predict(probe), single.predict(probe), atol=1e-8)


def test_krr_permutation_and_scaling():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(20, 2))
    y = rng.normal(size=20)
    w = rng.exponential(size=20)
    perm = rng.permutation(20)
    probe = rng.normal(size=(10, 2))
    a = fit_weighted_kernel_ridge(Dataset(X, y), w, 1.0, 0.1)
    b = fit_weighted_kernel_ridge(Dataset(X[perm], y[perm]), w[perm], 1.0, 0.1)
    np.testing.assert_allclose(a.predict(probe), b.predict(probe), atol=1e-10)
    c = fit_weighted_kernel_ridge(Dataset(X, y), 4.0 * w, 1.0, 0.4)
    np.testing.assert_allclose(a.predict(probe), c.predict(probe), atol=1e-10)


def test_krr_drops_tiny_weights_and_defaults():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(10, 2))
    w = np.ones(10)
    w[:3] = 1e-15
    m = fit_weighted_kernel_ridge(Dataset(X, rng.normal(size=10)), w)
    assert m.support_points.shape[0] == 7
    assert m.ridge == pytest.approx(1e-3 * 10)
    assert m.bandwidth == pytest.approx(median_bandwidth(X[3:]))
    with pytest.raises(FitError):
        fit_weighted_kernel_ridge(Dataset(X, np.zeros(10)), np.full(10, 1e-13))
    with pytest.raises(ValueError):
        fit_weighted_kernel_ridge(Dataset(X, np.zeros(10)), np.ones(10), bandwidth=-1.0)
    with pytest.raises(ValueError):
        fit_weighted_kernel_ridge(Dataset(X, np.zeros(10)), np.ones(10), ridge=0.0)


def test_metrics():
    assert mse([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert misclassification_rate([1.0, -1.0], [1.0, -1.0]) == 0.0
    assert misclassification_rate([1.0, -1.0], [1.0, 1.0]) == 0.5
    assert mse([0.0, 2.0], [1.0, 1.0]) == 1.0
    assert misclassification_rate([0.0], [1.0]) == 0.0
    with pytest.raises(ValueError):
        mse([1.0], [1.0, 2.0])


def test_fit_dispatch_and_normalization():
    data = _classification(60, 2, 8)
    w = np.random.default_rng(9).exponential(size=60)
    raw = fit(LearnerConfig("kernel_ridge", bandwidth=1.0, ridge=0.5), data, w)
    direct = fit_weighted_kernel_ridge(data, w, 1.0, 0.5)
    np.testing.assert_array_equal(raw.dual_coefficients, direct.dual_coefficients)
    normed = fit(LearnerConfig("kernel_ridge", bandwidth=1.0, ridge=0.5, normalize_weights=True), data, w)
    ref = fit_weighted_kernel_ridge(data, w / w.mean(), 1.0, 0.5)
    np.testing.assert_allclose(normed.dual_coefficients, ref.dual_coefficients, rtol=1e-12)
    with pytest.raises(ValueError):
        LearnerConfig("svm")
