"""Single-response partial least squares (PLS1) used by the KPLS kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mixed_sego.core.errors import DegenerateDataError, DomainError

_DEFLATION_FLOOR = 1e-12


@dataclass(frozen=True)
class PlsLoadings:
    """Rotated PLS weights B = W (P^T W)^-1 and the centering used to build them.

    Column q of ``rotations`` holds the influence coefficients of component q
    on the original (centered) inputs.
    """

    rotations: np.ndarray
    weights: np.ndarray
    x_loadings: np.ndarray
    y_loadings: np.ndarray
    x_mean: np.ndarray
    y_mean: float

    @property
    def n_components(self) -> int:
        return int(self.rotations.shape[1])

    @property
    def n_features(self) -> int:
        return int(self.rotations.shape[0])


def pls_fit(X: np.ndarray, y: np.ndarray, d: int) -> PlsLoadings:
    """Fit d PLS1 components with NIPALS, deflating X only."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DomainError(f"X shape {X.shape} does not match y length {y.shape[0]}")
    n_samples, n_features = X.shape
    if n_samples < 2:
        raise DomainError("PLS needs at least 2 samples")
    limit = min(n_features, n_samples - 1)
    if not 1 <= d <= limit:
        raise DomainError(f"component count {d} outside [1, {limit}]")

    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    residual = X - x_mean
    target = y - y_mean
    if float(np.dot(target, target)) == 0.0:
        raise DegenerateDataError("PLS output has zero variance")

    initial_norm = float(np.linalg.norm(residual))
    weights = np.zeros((n_features, d))
    x_loadings = np.zeros((n_features, d))
    y_loadings = np.zeros(d)

    for component in range(d):
        if float(np.linalg.norm(residual)) <= _DEFLATION_FLOOR * initial_norm:
            raise DegenerateDataError(
                f"input residual vanished before component {component + 1} of {d}"
            )
        direction = residual.T @ target
        norm = float(np.linalg.norm(direction))
        if norm <= _DEFLATION_FLOOR * max(initial_norm, 1.0):
            raise DegenerateDataError(
                f"no input covariance left for component {component + 1} of {d}"
            )
        w = direction / norm
        scores = residual @ w
        scores_ss = float(scores @ scores)
        p = residual.T @ scores / scores_ss
        weights[:, component] = w
        x_loadings[:, component] = p
        y_loadings[component] = float(target @ scores) / scores_ss
        residual = residual - np.outer(scores, p)

    rotations = weights @ np.linalg.pinv(x_loadings.T @ weights)

    for component in range(d):
        column = rotations[:, component]
        if column[int(np.argmax(np.abs(column)))] < 0:
            rotations[:, component] = -column
            weights[:, component] = -weights[:, component]
            x_loadings[:, component] = -x_loadings[:, component]
            y_loadings[component] = -y_loadings[component]

    return PlsLoadings(
        rotations=rotations,
        weights=weights,
        x_loadings=x_loadings,
        y_loadings=y_loadings,
        x_mean=x_mean,
        y_mean=y_mean,
    )


def pls_predict(loadings: PlsLoadings, X: np.ndarray) -> np.ndarray:
    """Linear PLS regression prediction built from the fitted components."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != loadings.n_features:
        raise DomainError(f"expected {loadings.n_features} features, got {X.shape[1]}")
    coefficients = loadings.rotations @ loadings.y_loadings
    return loadings.y_mean + (X - loadings.x_mean) @ coefficients
