"""Kriging surrogates with squared-exponential and KPLS correlation kernels.

Relaxed inputs are mapped affinely to [0, 1] with the bounds of the design
space and outputs are standardized before fitting; predictions are returned
in the original units. The regression trend is a constant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg, optimize

from mixed_sego.core.errors import DomainError, IllConditionedError
from mixed_sego.core.mixed_space import MixedSpace, centered_lhs, relax, relaxed_bounds
from mixed_sego.core.models import MixedPoint
from mixed_sego.core.pls import PlsLoadings, pls_fit

logger = logging.getLogger(__name__)

_FAILED_LIKELIHOOD = 1e10
_SIGMA2_FLOOR = 1e-12


class KernelVariant(str, Enum):
    FULL_SE = "full-se"
    KPLS_SE = "kpls-se"


@dataclass(frozen=True)
class KernelConfig:
    """Correlation kernel choice; KPLS carries d and, once fitted, its loadings."""

    variant: KernelVariant = KernelVariant.FULL_SE
    n_components: Optional[int] = None
    loadings: Optional[PlsLoadings] = None

    @classmethod
    def full_se(cls) -> "KernelConfig":
        return cls(KernelVariant.FULL_SE)

    @classmethod
    def kpls(cls, n_components: int, loadings: Optional[PlsLoadings] = None) -> "KernelConfig":
        if n_components < 1:
            raise DomainError("KPLS needs at least one component")
        return cls(KernelVariant.KPLS_SE, n_components=n_components, loadings=loadings)

    def hyperparameter_count(self, n_features: int) -> int:
        if self.variant is KernelVariant.FULL_SE:
            return n_features
        return int(self.n_components or 0)

    def effective_weights(self, theta: np.ndarray) -> np.ndarray:
        """Per-dimension weights w_p so that k(a, b) = exp(-sum_p w_p (a_p - b_p)^2)."""
        if self.variant is KernelVariant.FULL_SE:
            return np.asarray(theta, dtype=float)
        if self.loadings is None:
            raise DomainError("KPLS kernel has no loadings yet")
        return (self.loadings.rotations**2) @ np.asarray(theta, dtype=float)


@dataclass(frozen=True)
class GpOptions:
    """Hyperparameter search settings (see the ``[gp]`` config section)."""

    log10_theta_bounds: Tuple[float, float] = (-6.0, 2.0)
    n_starts: int = 5
    evals_per_dim: int = 200
    nugget_bounds: Tuple[float, float] = (1e-12, 1e-2)
    jitter: float = 1e-10
    max_jitter: float = 1e-6
    optimize_nugget: Optional[bool] = None


@dataclass(frozen=True)
class GpModel:
    """A fitted Gaussian process; immutable and safe to share between threads."""

    X: np.ndarray
    y: np.ndarray
    kernel: KernelConfig
    theta: np.ndarray
    nugget: float
    input_lower: np.ndarray
    input_scale: np.ndarray
    y_mean: float
    y_std: float
    mu_std: float
    sigma2_std: float
    chol: np.ndarray
    alpha: np.ndarray
    ones_solve: np.ndarray
    log_likelihood: float
    initial_log_likelihood: float
    degenerate: bool = False
    space: Optional[MixedSpace] = field(default=None, compare=False)

    @property
    def n_train(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.X.shape[1])

    @property
    def mu(self) -> float:
        """Estimated constant trend in output units."""
        return self.y_mean + self.y_std * self.mu_std

    @property
    def sigma2(self) -> float:
        """Estimated process variance in output units."""
        return self.sigma2_std * self.y_std**2

    @property
    def ones_quad(self) -> float:
        return float(np.sum(self.ones_solve))

    @property
    def weights(self) -> np.ndarray:
        return self.kernel.effective_weights(self.theta)

    def normalize(self, X: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(np.asarray(X, dtype=float)) - self.input_lower) / self.input_scale


def _check_theta(theta: np.ndarray) -> None:
    if np.any(~np.isfinite(theta)) or np.any(theta <= 0):
        raise DomainError("all kernel hyperparameters must be > 0")


def kernel_se(a: Sequence[float], b: Sequence[float], theta: Sequence[float]) -> float:
    """Squared-exponential correlation prod_p exp(-theta_p (a_p - b_p)^2)."""
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    theta_arr = np.asarray(theta, dtype=float)
    if not a_arr.shape == b_arr.shape == theta_arr.shape:
        raise DomainError(
            f"length mismatch: a={a_arr.shape}, b={b_arr.shape}, theta={theta_arr.shape}"
        )
    _check_theta(theta_arr)
    return float(np.prod(np.exp(-theta_arr * (a_arr - b_arr) ** 2)))


def kernel_kpls(
    a: Sequence[float],
    b: Sequence[float],
    theta: Sequence[float],
    loadings: Union[PlsLoadings, np.ndarray],
) -> float:
    """KPLS correlation exp(-sum_q theta_q sum_p (b^q_p)^2 (a_p - b_p)^2)."""
    rotations = loadings.rotations if isinstance(loadings, PlsLoadings) else np.asarray(loadings)
    rotations = np.atleast_2d(np.asarray(rotations, dtype=float))
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    theta_arr = np.asarray(theta, dtype=float)
    if a_arr.shape != b_arr.shape or rotations.shape != (a_arr.shape[0], theta_arr.shape[0]):
        raise DomainError(
            f"dimension mismatch: a={a_arr.shape}, b={b_arr.shape}, "
            f"theta={theta_arr.shape}, loadings={rotations.shape}"
        )
    _check_theta(theta_arr)
    exponent = 0.0
    for component in range(theta_arr.shape[0]):
        column = rotations[:, component]
        exponent += theta_arr[component] * float(np.sum(column**2 * (a_arr - b_arr) ** 2))
    return float(np.exp(-exponent))


def correlation_matrix(XA: np.ndarray, XB: np.ndarray, weights: np.ndarray) -> np.ndarray:
    diff = XA[:, None, :] - XB[None, :, :]
    return np.exp(-(diff**2) @ weights)


@dataclass
class _Factorization:
    chol: np.ndarray
    nugget: float
    mu: float
    sigma2: float
    alpha: np.ndarray
    ones_solve: np.ndarray
    objective: float


def _statistics(chol: np.ndarray, y: np.ndarray, nugget: float) -> _Factorization:
    n = y.shape[0]
    ones = np.ones(n)
    ones_solve = linalg.cho_solve((chol, True), ones)
    y_solve = linalg.cho_solve((chol, True), y)
    mu = float(ones @ y_solve) / float(ones @ ones_solve)
    alpha = linalg.cho_solve((chol, True), y - mu)
    sigma2 = float((y - mu) @ alpha) / n
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    if sigma2 <= 0 or not math.isfinite(sigma2):
        raise np.linalg.LinAlgError("non-positive process variance")
    objective = -n * math.log(sigma2) - log_det
    return _Factorization(chol, nugget, mu, sigma2, alpha, ones_solve, objective)


def _factorize(
    sq_diff: np.ndarray, y: np.ndarray, weights: np.ndarray, nugget: float
) -> _Factorization:
    R = np.exp(-sq_diff @ weights)
    R[np.diag_indices(y.shape[0])] += nugget
    return _statistics(linalg.cholesky(R, lower=True), y, nugget)


def _jitter_ladder(nugget: float, options: GpOptions) -> List[float]:
    ladder = [nugget]
    level = options.jitter
    while level <= options.max_jitter * (1 + 1e-9):
        if level > nugget:
            ladder.append(level)
        level *= 10.0
    return ladder


def _cholesky_with_jitter(
    sq_diff: np.ndarray,
    weights: np.ndarray,
    nugget: float,
    options: GpOptions,
) -> Tuple[np.ndarray, float]:
    base = np.exp(-sq_diff @ weights)
    diagonal = np.diag_indices(base.shape[0])
    last_error: Optional[Exception] = None
    for level in _jitter_ladder(nugget, options):
        R = base.copy()
        R[diagonal] += level
        try:
            chol = linalg.cholesky(R, lower=True)
        except (np.linalg.LinAlgError, linalg.LinAlgError, ValueError) as exc:
            last_error = exc
            continue
        if level != nugget:
            logger.warning("Correlation matrix needed jitter escalation to %.1e", level)
        return chol, level
    raise IllConditionedError(
        f"Cholesky failed up to jitter {options.max_jitter:.1e}: {last_error}"
    )


def _factorize_with_jitter(
    sq_diff: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    nugget: float,
    options: GpOptions,
) -> _Factorization:
    chol, level = _cholesky_with_jitter(sq_diff, weights, nugget, options)
    try:
        return _statistics(chol, y, level)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(f"degenerate likelihood statistics: {exc}") from exc


def _normalization(
    n_features: int,
    space: Optional[MixedSpace],
    bounds: Optional[Tuple[Sequence[float], Sequence[float]]],
) -> Tuple[np.ndarray, np.ndarray]:
    if space is not None:
        lower, upper = relaxed_bounds(space)
    elif bounds is not None:
        lower = np.asarray(bounds[0], dtype=float)
        upper = np.asarray(bounds[1], dtype=float)
    else:
        return np.zeros(n_features), np.ones(n_features)
    if lower.shape[0] != n_features:
        raise DomainError(f"bounds have {lower.shape[0]} entries, data has {n_features} columns")
    scale = upper - lower
    scale[scale <= 0] = 1.0
    return lower, scale


def _merge_duplicates(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    unique, inverse = np.unique(X, axis=0, return_inverse=True)
    if unique.shape[0] == X.shape[0]:
        return X, y
    inverse = np.asarray(inverse).ravel()
    merged = np.zeros(unique.shape[0])
    counts = np.bincount(inverse, minlength=unique.shape[0])
    np.add.at(merged, inverse, y)
    logger.debug("Merged %d duplicate training rows", X.shape[0] - unique.shape[0])
    return unique, merged / counts


def fit_gp(
    X: np.ndarray,
    y: np.ndarray,
    kernel: KernelConfig,
    budget: Optional[int] = None,
    *,
    space: Optional[MixedSpace] = None,
    bounds: Optional[Tuple[Sequence[float], Sequence[float]]] = None,
    options: GpOptions = GpOptions(),
    theta: Optional[Sequence[float]] = None,
    nugget: Optional[float] = None,
    seed: int = 0,
) -> GpModel:
    """Fit a constant-trend GP by maximizing the concentrated log-likelihood.

    ``budget`` caps likelihood evaluations per start (default
    ``options.evals_per_dim`` per hyperparameter). Passing ``theta`` freezes the
    hyperparameters; ``nugget`` then defaults to ``options.jitter``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise DomainError(f"X has {X.shape[0]} rows but y has {y.shape[0]} values")
    if X.shape[0] < 2:
        raise DomainError("a GP needs at least 2 training points")

    lower, scale = _normalization(X.shape[1], space, bounds)
    Xn, y = _merge_duplicates((X - lower) / scale, y)
    n_features = Xn.shape[1]

    y_mean = float(np.mean(y))
    y_std = float(np.std(y))
    degenerate = Xn.shape[0] < 2 or y_std <= 1e-14 * max(1.0, abs(y_mean))
    if degenerate:
        logger.warning("Constant training outputs; returning a constant model")
        y_std = 1.0
    y_s = (y - y_mean) / y_std

    if kernel.variant is KernelVariant.KPLS_SE and kernel.loadings is None:
        d = int(kernel.n_components or 1)
        if degenerate:
            # PLS is undefined on constant outputs; all-ones loadings tie the length-scales.
            ones = np.ones((n_features, d))
            loadings = PlsLoadings(ones, ones, ones, np.zeros(d), Xn.mean(axis=0), 0.0)
        else:
            loadings = pls_fit(Xn, y_s, d)
        kernel = KernelConfig.kpls(d, loadings)

    n_hyper = kernel.hyperparameter_count(n_features)
    sq_diff = (Xn[:, None, :] - Xn[None, :, :]) ** 2
    optimize_nugget = (
        options.optimize_nugget
        if options.optimize_nugget is not None
        else kernel.variant is KernelVariant.KPLS_SE
    )

    if degenerate:
        theta_arr = np.ones(n_hyper) if theta is None else np.asarray(theta, dtype=float)
        _check_theta(theta_arr)
        chol, level = _cholesky_with_jitter(
            sq_diff,
            kernel.effective_weights(theta_arr),
            options.jitter if nugget is None else float(nugget),
            options,
        )
        return GpModel(
            X=Xn, y=y, kernel=kernel, theta=theta_arr, nugget=level,
            input_lower=lower, input_scale=scale, y_mean=y_mean, y_std=1.0,
            mu_std=0.0, sigma2_std=_SIGMA2_FLOOR, chol=chol,
            alpha=np.zeros(Xn.shape[0]),
            ones_solve=linalg.cho_solve((chol, True), np.ones(Xn.shape[0])),
            log_likelihood=0.0, initial_log_likelihood=0.0, degenerate=True, space=space,
        )

    if theta is not None:
        theta_arr = np.asarray(theta, dtype=float)
        if theta_arr.shape != (n_hyper,):
            raise DomainError(f"expected {n_hyper} hyperparameters, got {theta_arr.shape}")
        _check_theta(theta_arr)
        fixed_nugget = options.jitter if nugget is None else float(nugget)
        if fixed_nugget < 0:
            raise DomainError("nugget must be >= 0")
        fact = _factorize_with_jitter(
            sq_diff, y_s, kernel.effective_weights(theta_arr), fixed_nugget, options
        )
        return _assemble(
            Xn, y, kernel, theta_arr, fact, lower, scale, y_mean, y_std,
            fact.objective, space,
        )

    theta_log, nugget_log = _search_hyperparameters(
        sq_diff, y_s, kernel, n_hyper, budget, options, optimize_nugget, nugget, seed
    )
    theta_arr = 10.0**theta_log
    base_nugget = 10.0**nugget_log if nugget_log is not None else (
        options.jitter if nugget is None else float(nugget)
    )
    fact = _factorize_with_jitter(
        sq_diff, y_s, kernel.effective_weights(theta_arr), base_nugget, options
    )
    initial = _objective_at(sq_diff, y_s, kernel, np.ones(n_hyper), base_nugget)
    return _assemble(
        Xn, y, kernel, theta_arr, fact, lower, scale, y_mean, y_std, initial, space
    )


def _assemble(
    Xn: np.ndarray,
    y: np.ndarray,
    kernel: KernelConfig,
    theta: np.ndarray,
    fact: _Factorization,
    lower: np.ndarray,
    scale: np.ndarray,
    y_mean: float,
    y_std: float,
    initial: float,
    space: Optional[MixedSpace],
) -> GpModel:
    return GpModel(
        X=Xn, y=y, kernel=kernel, theta=theta, nugget=fact.nugget,
        input_lower=lower, input_scale=scale, y_mean=y_mean, y_std=y_std,
        mu_std=fact.mu, sigma2_std=fact.sigma2, chol=fact.chol, alpha=fact.alpha,
        ones_solve=fact.ones_solve, log_likelihood=fact.objective,
        initial_log_likelihood=initial, space=space,
    )


def _objective_at(
    sq_diff: np.ndarray, y: np.ndarray, kernel: KernelConfig, theta: np.ndarray, nugget: float
) -> float:
    try:
        return _factorize(sq_diff, y, kernel.effective_weights(theta), nugget).objective
    except (np.linalg.LinAlgError, linalg.LinAlgError, ValueError):
        return -_FAILED_LIKELIHOOD


def _search_hyperparameters(
    sq_diff: np.ndarray,
    y: np.ndarray,
    kernel: KernelConfig,
    n_hyper: int,
    budget: Optional[int],
    options: GpOptions,
    optimize_nugget: bool,
    fixed_nugget: Optional[float],
    seed: int,
) -> Tuple[np.ndarray, Optional[float]]:
    log_lo, log_hi = options.log10_theta_bounds
    lower = [log_lo] * n_hyper
    upper = [log_hi] * n_hyper
    start = [0.0] * n_hyper
    if optimize_nugget:
        nug_lo, nug_hi = (math.log10(value) for value in options.nugget_bounds)
        lower.append(nug_lo)
        upper.append(nug_hi)
        start.append(min(max(-8.0, nug_lo), nug_hi))
    lower_arr = np.asarray(lower)
    upper_arr = np.asarray(upper)
    static_nugget = options.jitter if fixed_nugget is None else float(fixed_nugget)

    best: Dict[str, Any] = {"value": math.inf, "params": np.asarray(start, dtype=float)}

    def negative_likelihood(params: np.ndarray) -> float:
        clipped = np.clip(params, lower_arr, upper_arr)
        theta = 10.0 ** clipped[:n_hyper]
        level = 10.0 ** clipped[n_hyper] if optimize_nugget else static_nugget
        value = -_objective_at(sq_diff, y, kernel, theta, level)
        if value < best["value"]:
            best["value"] = value
            best["params"] = clipped.copy()
        return value

    starts = [np.asarray(start, dtype=float)]
    if options.n_starts > 1:
        rng = np.random.default_rng(seed)
        unit = centered_lhs(lower_arr.shape[0], options.n_starts - 1, rng)
        starts.extend(lower_arr + unit * (upper_arr - lower_arr))

    maxiter = budget if budget is not None else options.evals_per_dim * lower_arr.shape[0]
    constraints = []
    for index in range(lower_arr.shape[0]):
        constraints.append({"type": "ineq", "fun": lambda p, i=index: p[i] - lower_arr[i]})
        constraints.append({"type": "ineq", "fun": lambda p, i=index: upper_arr[i] - p[i]})

    for x0 in starts:
        negative_likelihood(x0)
        try:
            optimize.minimize(
                negative_likelihood,
                x0,
                method="COBYLA",
                constraints=constraints,
                options={"maxiter": int(maxiter), "rhobeg": 0.5},
            )
        except (ValueError, FloatingPointError) as exc:
            logger.debug("Likelihood search start failed: %s", exc)

    params = best["params"]
    logger.debug("Best concentrated log-likelihood %.6g", -best["value"])
    nugget_log = float(params[n_hyper]) if optimize_nugget else None
    return params[:n_hyper], nugget_log


def concentrated_log_likelihood(
    model: GpModel, theta: Sequence[float], nugget: Optional[float] = None
) -> float:
    """Concentrated log-likelihood -n log(sigma2) - log det R of the model data at theta."""
    theta_arr = np.asarray(theta, dtype=float)
    _check_theta(theta_arr)
    sq_diff = (model.X[:, None, :] - model.X[None, :, :]) ** 2
    y_s = (model.y - model.y_mean) / model.y_std
    level = model.nugget if nugget is None else float(nugget)
    return _objective_at(sq_diff, y_s, model.kernel, theta_arr, level)


def predict_many(model: GpModel, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and variance at each row of a relaxed matrix."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n_features:
        raise DomainError(f"expected {model.n_features} relaxed coordinates, got {X.shape[1]}")
    Xn = model.normalize(X)
    r = correlation_matrix(Xn, model.X, model.weights)
    mean_std = model.mu_std + r @ model.alpha
    if model.degenerate:
        variance_std = np.full(X.shape[0], model.sigma2_std)
    else:
        r_solve = linalg.cho_solve((model.chol, True), r.T)
        ones_r = model.ones_solve @ r.T
        variance_std = model.sigma2_std * (
            1.0 - np.sum(r * r_solve.T, axis=1) + (1.0 - ones_r) ** 2 / model.ones_quad
        )
    variance_std = np.maximum(variance_std, 0.0)
    return model.y_mean + model.y_std * mean_std, variance_std * model.y_std**2


def predict(
    model: GpModel, w: Union[MixedPoint, Sequence[float], np.ndarray]
) -> Tuple[float, float]:
    """Mean and variance at a single mixed point or relaxed vector."""
    if isinstance(w, MixedPoint):
        if model.space is None:
            raise DomainError("model was fitted without a space; pass a relaxed vector")
        vector = relax(w, model.space)
    else:
        vector = np.asarray(w, dtype=float)
        if vector.ndim != 1:
            raise DomainError("predict expects a single point")
    mean, variance = predict_many(model, vector[None, :])
    return float(mean[0]), float(variance[0])


def _hex_array(values: np.ndarray) -> Any:
    array = np.asarray(values, dtype=float)
    if array.ndim == 0:
        return float(array).hex()
    return [_hex_array(item) for item in array]


def _unhex_array(payload: Any) -> np.ndarray:
    def convert(item: Any) -> Any:
        if isinstance(item, list):
            return [convert(value) for value in item]
        return float.fromhex(item)

    return np.asarray(convert(payload), dtype=float)


def model_to_dict(model: GpModel) -> Dict[str, Any]:
    """Serialize a model; floats are hex strings so the round-trip is exact."""
    loadings = model.kernel.loadings
    return {
        "kernel": {
            "variant": model.kernel.variant.value,
            "n_components": model.kernel.n_components,
            "loadings": None
            if loadings is None
            else {
                "rotations": _hex_array(loadings.rotations),
                "weights": _hex_array(loadings.weights),
                "x_loadings": _hex_array(loadings.x_loadings),
                "y_loadings": _hex_array(loadings.y_loadings),
                "x_mean": _hex_array(loadings.x_mean),
                "y_mean": float(loadings.y_mean).hex(),
            },
        },
        "X": _hex_array(model.X),
        "y": _hex_array(model.y),
        "theta": _hex_array(model.theta),
        "nugget": float(model.nugget).hex(),
        "input_lower": _hex_array(model.input_lower),
        "input_scale": _hex_array(model.input_scale),
        "y_mean": float(model.y_mean).hex(),
        "y_std": float(model.y_std).hex(),
        "mu_std": float(model.mu_std).hex(),
        "sigma2_std": float(model.sigma2_std).hex(),
        "chol": _hex_array(model.chol),
        "alpha": _hex_array(model.alpha),
        "ones_solve": _hex_array(model.ones_solve),
        "log_likelihood": float(model.log_likelihood).hex(),
        "initial_log_likelihood": float(model.initial_log_likelihood).hex(),
        "degenerate": model.degenerate,
        "space": model.space.to_dict() if model.space is not None else None,
    }


def model_from_dict(payload: Dict[str, Any]) -> GpModel:
    kernel_payload = payload["kernel"]
    loadings_payload = kernel_payload.get("loadings")
    loadings = None
    if loadings_payload is not None:
        loadings = PlsLoadings(
            rotations=_unhex_array(loadings_payload["rotations"]),
            weights=_unhex_array(loadings_payload["weights"]),
            x_loadings=_unhex_array(loadings_payload["x_loadings"]),
            y_loadings=_unhex_array(loadings_payload["y_loadings"]),
            x_mean=_unhex_array(loadings_payload["x_mean"]),
            y_mean=float.fromhex(loadings_payload["y_mean"]),
        )
    kernel = KernelConfig(
        KernelVariant(kernel_payload["variant"]),
        n_components=kernel_payload.get("n_components"),
        loadings=loadings,
    )
    space_payload = payload.get("space")
    return GpModel(
        X=_unhex_array(payload["X"]),
        y=_unhex_array(payload["y"]),
        kernel=kernel,
        theta=_unhex_array(payload["theta"]),
        nugget=float.fromhex(payload["nugget"]),
        input_lower=_unhex_array(payload["input_lower"]),
        input_scale=_unhex_array(payload["input_scale"]),
        y_mean=float.fromhex(payload["y_mean"]),
        y_std=float.fromhex(payload["y_std"]),
        mu_std=float.fromhex(payload["mu_std"]),
        sigma2_std=float.fromhex(payload["sigma2_std"]),
        chol=_unhex_array(payload["chol"]),
        alpha=_unhex_array(payload["alpha"]),
        ones_solve=_unhex_array(payload["ones_solve"]),
        log_likelihood=float.fromhex(payload["log_likelihood"]),
        initial_log_likelihood=float.fromhex(payload["initial_log_likelihood"]),
        degenerate=bool(payload.get("degenerate", False)),
        space=MixedSpace.from_dict(space_payload) if space_payload is not None else None,
    )
