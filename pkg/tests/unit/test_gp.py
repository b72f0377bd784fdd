from __future__ import annotations

import json

import numpy as np
import pytest

from mixed_sego.core.errors import DomainError
from mixed_sego.core.gp import (
    GpOptions,
    KernelConfig,
    concentrated_log_likelihood,
    fit_gp,
    kernel_kpls,
    kernel_se,
    model_from_dict,
    model_to_dict,
    predict,
    predict_many,
)
from mixed_sego.core.mixed_space import MixedSpace, lhs_sample, relax_many
from mixed_sego.core.models import MixedPoint

FAST = GpOptions(n_starts=2, evals_per_dim=40)


def _dense_oracle(X: np.ndarray, y: np.ndarray, theta: np.ndarray, x: np.ndarray):
    """Constant-trend kriging predictor written out with explicit inverses."""
    n = X.shape[0]
    R = np.array([[np.exp(-np.sum(theta * (X[i] - X[j]) ** 2)) for j in range(n)]
                  for i in range(n)])
    Rinv = np.linalg.inv(R)
    ones = np.ones(n)
    mu = ones @ Rinv @ y / (ones @ Rinv @ ones)
    sigma2 = (y - mu) @ Rinv @ (y - mu) / n
    r = np.exp(-np.sum(theta * (X - x) ** 2, axis=1))
    mean = mu + r @ Rinv @ (y - mu)
    variance = sigma2 * (1 - r @ Rinv @ r + (1 - ones @ Rinv @ r) ** 2 / (ones @ Rinv @ ones))
    return mean, variance


def test_kernel_se_basic_values() -> None:
    assert kernel_se([0.3, 0.4], [0.3, 0.4], [1.0, 2.0]) == 1.0
    assert kernel_se([0.0], [1.0], [2.0]) == pytest.approx(np.exp(-2.0))
    assert kernel_se([0.0, 1.0], [0.5, 0.0], [1.0, 3.0]) == kernel_se(
        [0.5, 0.0], [0.0, 1.0], [1.0, 3.0]
    )


def test_kernel_decreases_with_distance() -> None:
    values = [kernel_se([0.0, 0.0], [t, t], [1.0, 1.0]) for t in (0.0, 0.1, 0.5, 1.0)]
    assert values == sorted(values, reverse=True)


def test_kernel_rejects_bad_arguments() -> None:
    with pytest.raises(DomainError):
        kernel_se([0.0, 1.0], [0.0], [1.0])
    with pytest.raises(DomainError):
        kernel_se([0.0], [1.0], [0.0])
    with pytest.raises(DomainError):
        kernel_kpls([0.0, 1.0], [0.0, 1.0], [1.0, 1.0], np.ones((2, 1)))


def test_kernel_kpls_ignores_zero_loading_dimensions() -> None:
    value = kernel_kpls([0.0, 5.0], [1.0, 9.0], [2.0], np.array([[1.0], [0.0]]))
    assert value == pytest.approx(np.exp(-2.0), abs=1e-15)


def test_kernel_kpls_with_unit_loadings_equals_tied_se(rng: np.random.Generator) -> None:
    for _ in range(10_000):
        dim = int(rng.integers(1, 6))
        a, b = rng.random(dim), rng.random(dim)
        t = float(10 ** rng.uniform(-2, 1))
        kpls = kernel_kpls(a, b, [t], np.ones((dim, 1)))
        assert abs(kpls - kernel_se(a, b, [t] * dim)) <= 1e-14


def test_frozen_theta_matches_dense_oracle_on_three_points() -> None:
    X = np.array([[0.0], [1.0], [2.0]])
    y = np.array([0.0, 1.0, 0.0])
    model = fit_gp(X, y, KernelConfig.full_se(), theta=[1.0], nugget=0.0)
    mean, variance = predict(model, [1.0])
    assert mean == pytest.approx(1.0, abs=1e-12)
    oracle_mean, oracle_variance = _dense_oracle(X, y, np.array([1.0]), np.array([0.5]))
    mean, variance = predict(model, [0.5])
    assert abs(mean - oracle_mean) <= 1e-10
    assert abs(variance - oracle_variance) <= 1e-10


def test_frozen_theta_matches_dense_oracle_on_small_designs(rng: np.random.Generator) -> None:
    for _ in range(20):
        n, dim = int(rng.integers(2, 6)), int(rng.integers(1, 4))
        X = rng.random((n, dim))
        y = rng.standard_normal(n)
        theta = 10 ** rng.uniform(-0.5, 1.0, dim)
        model = fit_gp(X, y, KernelConfig.full_se(), theta=theta, nugget=0.0)
        for x in rng.random((5, dim)):
            oracle_mean, oracle_variance = _dense_oracle(X, y, theta, x)
            mean, variance = predict(model, x)
            assert abs(mean - oracle_mean) <= 1e-10
            assert abs(variance - max(oracle_variance, 0.0)) <= 1e-10


def test_interpolation_at_training_points(rng: np.random.Generator) -> None:
    for _ in range(50):
        n, dim = int(rng.integers(3, 8)), int(rng.integers(2, 5))
        X = rng.random((n, dim))
        y = rng.standard_normal(n) * 10.0
        theta = 10 ** rng.uniform(1.0, 2.0, dim)
        model = fit_gp(X, y, KernelConfig.full_se(), theta=theta, nugget=0.0)
        mean, variance = predict_many(model, X)
        spread = float(np.ptp(y))
        assert np.all(np.abs(mean - y) <= 1e-8 * spread)
        assert np.all(variance <= 1e-8 * model.sigma2)


def test_prediction_far_from_data_reverts_to_trend() -> None:
    X = np.array([[0.0], [0.4], [1.0]])
    y = np.array([1.0, 3.0, 2.0])
    model = fit_gp(X, y, KernelConfig.full_se(), theta=[5.0], nugget=0.0)
    mean, variance = predict(model, [100.0])
    assert mean == pytest.approx(model.mu, abs=1e-12)
    assert variance == pytest.approx(model.sigma2 * (1 + 1 / model.ones_quad), rel=1e-10)


def test_constant_outputs_give_constant_model(caplog: pytest.LogCaptureFixture) -> None:
    X = np.array([[0.0], [0.5], [1.0]])
    with caplog.at_level("WARNING"):
        model = fit_gp(X, np.full(3, 7.0), KernelConfig.full_se(), options=FAST)
    assert model.degenerate
    assert "Constant training outputs" in caplog.text
    mean, variance = predict_many(model, np.array([[0.2], [3.0]]))
    np.testing.assert_allclose(mean, 7.0)
    assert np.all(variance >= 0)


def test_likelihood_search_improves_on_initial_theta(rng: np.random.Generator) -> None:
    X = rng.random((12, 2))
    y = np.sin(6 * X[:, 0]) + X[:, 1] ** 2
    model = fit_gp(X, y, KernelConfig.full_se(), options=FAST, seed=3)
    assert model.log_likelihood >= model.initial_log_likelihood
    assert model.log_likelihood == pytest.approx(
        concentrated_log_likelihood(model, model.theta), abs=1e-9
    )
    assert np.all(model.theta >= 1e-6) and np.all(model.theta <= 1e2 * (1 + 1e-9))


def test_kpls_fit_uses_reduced_hyperparameters(rng: np.random.Generator) -> None:
    X = rng.random((15, 6))
    y = X @ np.array([3.0, 1.0, 0.0, 0.0, 0.5, 0.0])
    model = fit_gp(X, y, KernelConfig.kpls(2), options=FAST)
    assert model.theta.shape == (2,)
    assert model.kernel.loadings is not None
    assert model.kernel.loadings.rotations.shape == (6, 2)
    assert model.weights.shape == (6,)
    assert 1e-12 * (1 - 1e-9) <= model.nugget <= 1e-2 * (1 + 1e-9)


def test_mixed_point_prediction_needs_space() -> None:
    space = MixedSpace.build(continuous=[(0.0, 1.0)], categoricals=[2])
    points = lhs_sample(space, 6, seed=1)
    X = relax_many(points, space)
    y = np.array([point.x[0] + point.c[0] for point in points])
    model = fit_gp(X, y, KernelConfig.full_se(), space=space, options=FAST)
    mean, _ = predict(model, points[0])
    assert mean == pytest.approx(y[0], abs=1e-4)
    bare = fit_gp(X, y, KernelConfig.full_se(), options=FAST)
    with pytest.raises(DomainError):
        predict(bare, MixedPoint.of([0.5], [], [1]))


def test_duplicate_rows_are_merged() -> None:
    X = np.array([[0.0], [0.5], [0.5], [1.0]])
    y = np.array([0.0, 1.0, 3.0, 0.0])
    model = fit_gp(X, y, KernelConfig.full_se(), theta=[2.0], nugget=0.0)
    assert model.n_train == 3
    mean, _ = predict(model, [0.5])
    assert mean == pytest.approx(2.0, abs=1e-9)


def test_shape_errors() -> None:
    with pytest.raises(DomainError):
        fit_gp(np.zeros((3, 1)), np.zeros(2), KernelConfig.full_se())
    with pytest.raises(DomainError):
        fit_gp(np.zeros((1, 1)), np.zeros(1), KernelConfig.full_se())
    model = fit_gp(np.array([[0.0], [1.0]]), np.array([0.0, 1.0]), KernelConfig.full_se(),
                   theta=[1.0])
    with pytest.raises(DomainError):
        predict(model, [0.0, 1.0])


def test_model_serialization_is_exact(rng: np.random.Generator) -> None:
    X = rng.random((8, 3))
    y = X.sum(axis=1) ** 2
    model = fit_gp(X, y, KernelConfig.kpls(1), options=FAST)
    restored = model_from_dict(json.loads(json.dumps(model_to_dict(model))))
    probe = rng.random((4, 3))
    for original, copy in zip(predict_many(model, probe), predict_many(restored, probe)):
        assert np.array_equal(original, copy)
