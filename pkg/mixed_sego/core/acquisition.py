"""Infill criteria and their constrained maximization over the relaxed box."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy import optimize
from scipy.stats import norm

from mixed_sego.core.errors import DomainError
from mixed_sego.core.gp import GpModel, predict_many
from mixed_sego.core.mixed_space import MixedSpace, relaxed_bounds

logger = logging.getLogger(__name__)

# Surrogate bounds at or below this value count as satisfied.
_BOUND_TOL = 1e-9


class AcquisitionKind(str, Enum):
    EI = "ei"
    WB2 = "wb2"
    WB2S = "wb2s"


@dataclass(frozen=True)
class FeasibilityMode:
    """How constraint surrogates shape the estimated feasible region.

    ``kappa == 0`` uses the mean prediction; ``kappa > 0`` is the upper trust
    bound g_mean - kappa * g_std.
    """

    kappa: float = 0.0

    def __post_init__(self) -> None:
        if self.kappa < 0 or not math.isfinite(self.kappa):
            raise DomainError(f"UTB multiplier must be finite and >= 0, got {self.kappa}")

    @classmethod
    def mean(cls) -> "FeasibilityMode":
        return cls(0.0)

    @classmethod
    def utb(cls, kappa: float = 3.0) -> "FeasibilityMode":
        return cls(float(kappa))

    @property
    def is_utb(self) -> bool:
        return self.kappa > 0

    @property
    def label(self) -> str:
        return f"utb:{self.kappa:g}" if self.is_utb else "mean"


@dataclass(frozen=True)
class AcquisitionConfig:
    """Criterion choice and inner-maximization budget (``[sego]`` config section)."""

    kind: AcquisitionKind = AcquisitionKind.WB2S
    beta: float = 100.0
    population_factor: int = 50
    generations: int = 100
    ranking_probability: float = 0.45
    local_starts: int = 3
    local_evals: int = 500

    def __post_init__(self) -> None:
        if self.population_factor < 1 or self.generations < 1:
            raise DomainError("population factor and generations must be >= 1")
        if self.local_starts < 0 or self.local_evals < 0:
            raise DomainError("local refinement budget must be >= 0")
        if self.beta <= 0:
            raise DomainError("WB2s beta must be > 0")


@dataclass(frozen=True)
class AcquisitionResult:
    """Chosen relaxed vector plus the ranked alternatives for the duplicate guard."""

    vector: np.ndarray
    value: float
    candidates: Tuple[np.ndarray, ...]
    fallback: bool
    scale: float = 1.0


def expected_improvement(mean: float, std: float, f_min: float) -> float:
    """EI = (f_min - mean) Phi(u) + std phi(u) with u = (f_min - mean) / std."""
    if std < 0:
        raise DomainError(f"standard deviation must be >= 0, got {std}")
    improvement = f_min - mean
    if std == 0:
        return max(improvement, 0.0)
    u = improvement / std
    return max(improvement * float(norm.cdf(u)) + std * float(norm.pdf(u)), 0.0)


def expected_improvement_many(mean: np.ndarray, std: np.ndarray, f_min: float) -> np.ndarray:
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    improvement = f_min - mean
    values = np.maximum(improvement, 0.0)
    positive = std > 0
    if np.any(positive):
        u = improvement[positive] / std[positive]
        values[positive] = improvement[positive] * norm.cdf(u) + std[positive] * norm.pdf(u)
    return np.maximum(values, 0.0)


def wb2s(mean: float, std: float, f_min: float, scale: float) -> float:
    """Scaled Watson-Barnes criterion s * EI - mean; s = 1 gives WB2."""
    if scale <= 0:
        raise DomainError(f"WB2s scale must be > 0, got {scale}")
    return scale * expected_improvement(mean, std, f_min) - mean


def compute_wb2s_scale(
    model: GpModel,
    candidate_points: np.ndarray,
    f_min: float,
    beta: float = 100.0,
) -> float:
    """s = beta |f_hat(x+)| / EI(x+) at the candidate with the largest EI, else 1."""
    candidates = np.atleast_2d(np.asarray(candidate_points, dtype=float))
    if candidates.shape[0] == 0:
        raise DomainError("at least one candidate point is required")
    mean, variance = predict_many(model, candidates)
    ei = expected_improvement_many(mean, np.sqrt(variance), f_min)
    best = int(np.argmax(ei))
    if ei[best] <= 0 or mean[best] == 0:
        return 1.0
    return float(beta * abs(mean[best]) / ei[best])


def feasibility_bound(g_mean: float, g_std: float, mode: FeasibilityMode) -> float:
    """Relaxed constraint value; a point is admitted when it is <= 0."""
    if g_std < 0:
        raise DomainError(f"standard deviation must be >= 0, got {g_std}")
    return g_mean - mode.kappa * g_std


def acquisition_values(
    model: GpModel,
    X: np.ndarray,
    f_min: float,
    kind: AcquisitionKind,
    scale: float = 1.0,
) -> np.ndarray:
    mean, variance = predict_many(model, X)
    ei = expected_improvement_many(mean, np.sqrt(variance), f_min)
    if kind is AcquisitionKind.EI:
        return ei
    if kind is AcquisitionKind.WB2:
        return ei - mean
    return scale * ei - mean


def constraint_bounds(
    models: Sequence[GpModel], X: np.ndarray, mode: FeasibilityMode
) -> np.ndarray:
    """Matrix of surrogate feasibility bounds, one column per constraint."""
    X = np.atleast_2d(X)
    if not models:
        return np.zeros((X.shape[0], 0))
    columns = []
    for model in models:
        mean, variance = predict_many(model, X)
        columns.append(mean - mode.kappa * np.sqrt(variance))
    return np.column_stack(columns)


def _violation(bounds: np.ndarray) -> np.ndarray:
    if bounds.shape[1] == 0:
        return np.zeros(bounds.shape[0])
    return np.sum(np.maximum(bounds - _BOUND_TOL, 0.0), axis=1)


def _stochastic_rank(
    fitness: np.ndarray,
    violation: np.ndarray,
    probability: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Bubble-sort ranking mixing objective and violation comparisons (minimization)."""
    if not np.any(violation > 0):
        # Only objective comparisons remain: the bubble sort is a stable sort.
        return np.argsort(fitness, kind="stable")
    phi = fitness.tolist()
    psi = violation.tolist()
    order = list(range(len(phi)))
    for _ in range(len(order)):
        draws = rng.random(max(len(order) - 1, 0)).tolist()
        swapped = False
        for j in range(len(order) - 1):
            a, b = order[j], order[j + 1]
            if (psi[a] == 0 and psi[b] == 0) or draws[j] < probability:
                worse = phi[a] > phi[b]
            else:
                worse = psi[a] > psi[b]
            if worse:
                order[j], order[j + 1] = b, a
                swapped = True
        if not swapped:
            break
    return np.asarray(order)


def _feasibility_order(values: np.ndarray, violation: np.ndarray) -> np.ndarray:
    """Feasible points by decreasing value, then infeasible ones by increasing violation."""
    return np.lexsort((-values, violation))


def _evolution(
    evaluate: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    lower: np.ndarray,
    upper: np.ndarray,
    cfg: AcquisitionConfig,
    rng: np.random.Generator,
    initial: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    dimension = lower.shape[0]
    size = initial.shape[0]
    parents = max(size // 7, 1)
    span = upper - lower
    tau = 1.0 / math.sqrt(2.0 * math.sqrt(dimension))
    tau_global = 1.0 / math.sqrt(2.0 * dimension)

    population = initial
    sigma = np.tile(span / math.sqrt(dimension), (size, 1))
    values, violation = evaluate(population)
    archive_X, archive_values, archive_violation = [population], [values], [violation]

    for generation in range(cfg.generations):
        ranked = _stochastic_rank(-values, violation, cfg.ranking_probability, rng)[:parents]
        chosen = ranked[np.arange(size) % parents]
        offspring = population[chosen].copy()
        offspring_sigma = sigma[chosen].copy()
        # Differential step from the best parent for the first offspring.
        for k in range(parents - 1):
            best, nxt = population[ranked[0]], population[ranked[k + 1]]
            offspring[k] = population[ranked[k]] + 0.85 * (best - nxt)
        mutate = np.arange(size) >= parents - 1
        n_mutated = int(mutate.sum())
        offspring_sigma[mutate] *= np.exp(
            tau_global * rng.standard_normal((n_mutated, 1))
            + tau * rng.standard_normal((n_mutated, dimension))
        )
        offspring_sigma = np.minimum(offspring_sigma, span)
        offspring[mutate] += offspring_sigma[mutate] * rng.standard_normal((n_mutated, dimension))
        population = np.clip(offspring, lower, upper)
        sigma = offspring_sigma
        values, violation = evaluate(population)
        archive_X.append(population)
        archive_values.append(values)
        archive_violation.append(violation)
        if generation % 25 == 0:
            logger.debug(
                "Generation %d: best value %.6g, feasible %d/%d",
                generation, float(np.max(values)), int(np.sum(violation == 0)), size,
            )

    return np.vstack(archive_X), np.concatenate(archive_values), np.concatenate(archive_violation)


def maximize_acquisition(
    objective: GpModel,
    constraints: Sequence[GpModel],
    space: MixedSpace,
    f_min: float,
    cfg: AcquisitionConfig = AcquisitionConfig(),
    feasibility: FeasibilityMode = FeasibilityMode(),
    seed: int = 0,
) -> AcquisitionResult:
    """Maximize the criterion over the relaxed box subject to the surrogate bounds.

    A stochastic-ranking evolution strategy explores the box, then COBYLA
    refines the best few distinct candidates. When no candidate satisfies every
    bound the least-violating one is returned with ``fallback`` set.
    """
    lower, upper = relaxed_bounds(space)
    if lower.shape[0] != objective.n_features:
        raise DomainError(
            f"space has {lower.shape[0]} relaxed coordinates, model expects {objective.n_features}"
        )
    rng = np.random.default_rng(seed)
    dimension = lower.shape[0]
    size = max(int(math.ceil(cfg.population_factor * math.sqrt(dimension))), 7)
    initial = lower + rng.random((size, dimension)) * (upper - lower)

    scale = 1.0
    if cfg.kind is AcquisitionKind.WB2S:
        scale = compute_wb2s_scale(objective, initial, f_min, cfg.beta)

    def evaluate(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        values = acquisition_values(objective, X, f_min, cfg.kind, scale)
        return values, _violation(constraint_bounds(constraints, X, feasibility))

    X_all, values_all, violation_all = _evolution(evaluate, lower, upper, cfg, rng, initial)
    order = _feasibility_order(values_all, violation_all)

    starts: List[np.ndarray] = []
    for index in order:
        candidate = X_all[index]
        if all(not np.allclose(candidate, other) for other in starts):
            starts.append(candidate)
        if len(starts) >= max(cfg.local_starts, 1):
            break

    refined: List[np.ndarray] = []
    for x0 in starts[: cfg.local_starts]:
        refined.append(_refine(x0, lower, upper, evaluate, constraints, feasibility, cfg))

    if refined:
        X_refined = np.vstack(refined)
        values_refined, violation_refined = evaluate(X_refined)
        X_all = np.vstack([X_refined, X_all])
        values_all = np.concatenate([values_refined, values_all])
        violation_all = np.concatenate([violation_refined, violation_all])
        order = _feasibility_order(values_all, violation_all)

    best = int(order[0])
    fallback = bool(violation_all[best] > 0)
    if fallback:
        logger.warning(
            "No candidate satisfies the surrogate constraints; least violation %.3g",
            float(violation_all[best]),
        )

    ranked: List[np.ndarray] = []
    for index in order:
        candidate = X_all[index]
        if all(not np.array_equal(candidate, other) for other in ranked):
            ranked.append(candidate.copy())
        if len(ranked) >= 20:
            break
    return AcquisitionResult(
        vector=X_all[best].copy(),
        value=float(values_all[best]),
        candidates=tuple(ranked),
        fallback=fallback,
        scale=scale,
    )


def _refine(
    x0: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    evaluate: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    constraints: Sequence[GpModel],
    feasibility: FeasibilityMode,
    cfg: AcquisitionConfig,
) -> np.ndarray:
    best: Dict[str, Any] = {"x": x0.copy(), "key": None}

    def key(x: np.ndarray) -> Tuple[float, float]:
        values, violation = evaluate(x[None, :])
        return float(violation[0]), -float(values[0])

    def remember(x: np.ndarray, current: Tuple[float, float]) -> None:
        if best["key"] is None or current < best["key"]:
            best["key"] = current
            best["x"] = x.copy()

    def negative(x: np.ndarray) -> float:
        clipped = np.clip(x, lower, upper)
        current = key(clipped)
        remember(clipped, current)
        return current[1]

    remember(x0, key(x0))
    cons: List[dict] = []
    for index in range(lower.shape[0]):
        cons.append({"type": "ineq", "fun": lambda x, i=index: x[i] - lower[i]})
        cons.append({"type": "ineq", "fun": lambda x, i=index: upper[i] - x[i]})
    for model in constraints:
        cons.append(
            {
                "type": "ineq",
                "fun": lambda x, m=model: -float(
                    constraint_bounds([m], np.clip(x, lower, upper)[None, :], feasibility)[0, 0]
                ),
            }
        )
    try:
        optimize.minimize(
            negative,
            x0,
            method="COBYLA",
            constraints=cons,
            options={"maxiter": int(cfg.local_evals), "rhobeg": 0.1 * float(np.max(upper - lower))},
        )
    except (ValueError, FloatingPointError) as exc:
        logger.debug("Acquisition refinement failed: %s", exc)
    return best["x"]
