"""Non-surrogate baselines: a real-coded genetic algorithm and random search."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from mixed_sego.core.errors import DomainError
from mixed_sego.core.mixed_space import (
    centered_lhs,
    project,
    relaxed_bounds,
    relaxed_dim,
)
from mixed_sego.core.models import Evaluation, RunRecord
from mixed_sego.core.sego import Problem, evaluate_point

logger = logging.getLogger(__name__)

PENALTY = 1e6


@dataclass(frozen=True)
class GaConfig:
    """(mu + lambda) GA settings: SBX crossover and polynomial mutation."""

    population: int = 20
    crossover_probability: float = 1.0
    crossover_eta: float = 15.0
    mutation_eta: float = 20.0
    mutation_probability: Optional[float] = None
    violation_tol: float = 1e-4
    record_wall_time: bool = False

    def __post_init__(self) -> None:
        if self.population < 2:
            raise DomainError("GA population must be >= 2")


def _penalized(evaluation: Evaluation) -> float:
    if evaluation.failed:
        return math.inf
    return evaluation.f + PENALTY * evaluation.violation


def _sbx(
    a: np.ndarray,
    b: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    eta: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    u = rng.random(a.shape[0])
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )
    # Each coordinate is exchanged with probability one half.
    swap = rng.random(a.shape[0]) < 0.5
    child_a = 0.5 * ((1.0 + beta) * a + (1.0 - beta) * b)
    child_b = 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b)
    child_a[swap], child_b[swap] = child_b[swap].copy(), child_a[swap].copy()
    return np.clip(child_a, lower, upper), np.clip(child_b, lower, upper)


def _polynomial_mutation(
    x: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    eta: float,
    probability: float,
    rng: np.random.Generator,
) -> np.ndarray:
    mutated = x.copy()
    span = upper - lower
    for index in np.flatnonzero(rng.random(x.shape[0]) < probability):
        if span[index] <= 0:
            continue
        u = rng.random()
        if u < 0.5:
            delta = (2.0 * u) ** (1.0 / (eta + 1.0)) - 1.0
        else:
            delta = 1.0 - (2.0 * (1.0 - u)) ** (1.0 / (eta + 1.0))
        mutated[index] = x[index] + delta * span[index]
    return np.clip(mutated, lower, upper)


def _tournament(fitness: List[float], rng: np.random.Generator) -> int:
    a, b = rng.choice(len(fitness), size=2, replace=False)
    return int(a) if fitness[int(a)] <= fitness[int(b)] else int(b)


def ga_baseline(
    problem: Problem,
    budget: int,
    seed: int,
    cfg: GaConfig = GaConfig(),
    *,
    method: str = "ga",
) -> RunRecord:
    """Evolve a population over the relaxed box, projecting before every evaluation.

    ``budget`` counts evaluations after the initial population; ``0`` returns
    the initial population only. Constraints enter as a static penalty.
    """
    if budget < 0:
        raise DomainError(f"budget must be >= 0, got {budget}")
    space = problem.space
    rng = np.random.default_rng(seed)
    lower, upper = relaxed_bounds(space)
    dimension = relaxed_dim(space)
    mutation_probability = cfg.mutation_probability or 1.0 / dimension
    record = RunRecord(
        problem=problem.name,
        method=method,
        seed=seed,
        doe_size=cfg.population,
        n_constraints=problem.n_constraints,
        violation_tol=cfg.violation_tol,
    )
    incumbent: Optional[float] = None

    def evaluate(genome: np.ndarray, generation: int) -> float:
        nonlocal incumbent
        evaluation = evaluate_point(
            problem, project(genome, space), len(record.evaluations), generation,
            cfg.violation_tol, incumbent, cfg.record_wall_time,
        )
        incumbent = evaluation.incumbent
        record.evaluations.append(evaluation)
        return _penalized(evaluation)

    genomes = lower + centered_lhs(dimension, cfg.population, rng) * (upper - lower)
    population = [row for row in genomes]
    fitness = [evaluate(genome, 0) for genome in population]

    remaining = budget
    generation = 0
    while remaining > 0:
        generation += 1
        offspring: List[np.ndarray] = []
        while len(offspring) < min(cfg.population, remaining):
            a = population[_tournament(fitness, rng)]
            b = population[_tournament(fitness, rng)]
            if rng.random() < cfg.crossover_probability:
                children = _sbx(a, b, lower, upper, cfg.crossover_eta, rng)
            else:
                children = (a.copy(), b.copy())
            for child in children:
                offspring.append(
                    _polynomial_mutation(
                        child, lower, upper, cfg.mutation_eta, mutation_probability, rng
                    )
                )
        offspring = offspring[: min(cfg.population, remaining)]
        offspring_fitness = [evaluate(child, generation) for child in offspring]
        remaining -= len(offspring)

        merged = population + offspring
        merged_fitness = fitness + offspring_fitness
        # Stable sort keeps older members first on ties.
        order = sorted(range(len(merged)), key=lambda index: merged_fitness[index])
        survivors = order[: cfg.population]
        population = [merged[index] for index in survivors]
        fitness = [merged_fitness[index] for index in survivors]
        logger.debug("GA generation %d: best penalized %.6g", generation, fitness[0])

    logger.info(
        "%s ga: %d evaluations, incumbent %s", problem.name, len(record.evaluations), incumbent
    )
    return record


def random_search(
    problem: Problem,
    evaluations: int,
    seed: int,
    *,
    doe_size: int = 0,
    violation_tol: float = 1e-4,
    method: str = "random",
) -> RunRecord:
    """Uniform sampling of the relaxed box, projected to the mixed space."""
    if evaluations < 0:
        raise DomainError(f"evaluation count must be >= 0, got {evaluations}")
    space = problem.space
    rng = np.random.default_rng(seed)
    lower, upper = relaxed_bounds(space)
    record = RunRecord(
        problem=problem.name,
        method=method,
        seed=seed,
        doe_size=min(doe_size, evaluations),
        n_constraints=problem.n_constraints,
        violation_tol=violation_tol,
    )
    incumbent: Optional[float] = None
    for index in range(evaluations):
        vector = lower + rng.random(lower.shape[0]) * (upper - lower)
        iteration = 0 if index < doe_size else index - doe_size + 1
        evaluation = evaluate_point(
            problem, project(vector, space), index, iteration, violation_tol, incumbent, False
        )
        incumbent = evaluation.incumbent
        record.evaluations.append(evaluation)
    return record
