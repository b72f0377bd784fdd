from __future__ import annotations

import itertools

import numpy as np
import pytest

from mixed_sego.core.errors import DegenerateDataError, DomainError
from mixed_sego.core.pls import pls_fit, pls_predict


def _factorial(dimension: int) -> np.ndarray:
    """Two-level full factorial: centered, mutually orthogonal columns."""
    return np.array(list(itertools.product([-1.0, 1.0], repeat=dimension)))


def test_single_factor_output_aligns_with_first_axis() -> None:
    X = _factorial(3)
    loadings = pls_fit(X, 5.0 * X[:, 0], 1)
    column = loadings.rotations[:, 0]
    assert column[0] > 0
    assert np.abs(column[1:]).max() < 1e-10
    assert loadings.n_components == 1
    assert loadings.n_features == 3


def test_orthogonal_inputs_weight_two_active_dimensions_equally() -> None:
    X = _factorial(4)
    loadings = pls_fit(X, X[:, 0] + X[:, 1], 1)
    w = loadings.weights[:, 0]
    assert w[0] == pytest.approx(w[1], abs=1e-10)
    assert np.abs(w[2:]).max() < 1e-10


def test_full_rank_fit_completes_with_nonzero_columns(rng: np.random.Generator) -> None:
    X = rng.random((6, 8))
    y = rng.random(6)
    loadings = pls_fit(X, y, 5)
    assert loadings.rotations.shape == (8, 5)
    assert np.all(np.linalg.norm(loadings.rotations, axis=0) > 0)


def test_loadings_ignore_constant_shift_of_output(rng: np.random.Generator) -> None:
    X = rng.random((10, 4))
    y = X @ np.array([1.0, -2.0, 0.5, 0.0]) + 0.1 * rng.random(10)
    first = pls_fit(X, y, 2)
    shifted = pls_fit(X, y + 100.0, 2)
    np.testing.assert_allclose(first.rotations, shifted.rotations, atol=1e-10)


def test_linear_data_is_reproduced_with_rank_components(rng: np.random.Generator) -> None:
    X = rng.random((15, 3))
    y = X @ np.array([2.0, -1.0, 4.0]) + 3.0
    loadings = pls_fit(X, y, 3)
    np.testing.assert_allclose(pls_predict(loadings, X), y, rtol=1e-8)


def test_fit_is_bitwise_deterministic(rng: np.random.Generator) -> None:
    X = rng.random((9, 5))
    y = rng.random(9)
    first = pls_fit(X, y, 3)
    second = pls_fit(X.copy(), y.copy(), 3)
    assert np.array_equal(first.rotations, second.rotations)


def test_constant_output_is_degenerate(rng: np.random.Generator) -> None:
    with pytest.raises(DegenerateDataError):
        pls_fit(rng.random((5, 2)), np.full(5, 3.0), 1)


def test_component_count_out_of_range(rng: np.random.Generator) -> None:
    X = rng.random((4, 6))
    y = rng.random(4)
    with pytest.raises(DomainError):
        pls_fit(X, y, 0)
    with pytest.raises(DomainError):
        pls_fit(X, y, 4)


def test_predict_rejects_wrong_feature_count(rng: np.random.Generator) -> None:
    loadings = pls_fit(rng.random((5, 3)), rng.random(5), 1)
    with pytest.raises(DomainError):
        pls_predict(loadings, np.zeros((1, 2)))
