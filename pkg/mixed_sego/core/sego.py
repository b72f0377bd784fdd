"""SEGO enrichment loop over mixed spaces through continuous relaxation."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from mixed_sego.core.acquisition import (
    AcquisitionConfig,
    AcquisitionResult,
    FeasibilityMode,
    maximize_acquisition,
)
from mixed_sego.core.errors import (
    DegenerateDataError,
    DomainError,
    EvaluationError,
    IllConditionedError,
)
from mixed_sego.core.gp import GpModel, GpOptions, KernelConfig, fit_gp
from mixed_sego.core.kpls_adaptive import AdaptiveConfig, ComponentTrial, select_components
from mixed_sego.core.mixed_space import (
    MixedSpace,
    contains,
    lhs_sample,
    project,
    relax_many,
    relaxed_bounds,
    relaxed_dim,
)
from mixed_sego.core.models import (
    Evaluation,
    IterationInfo,
    MixedPoint,
    RunRecord,
    total_violation,
)

logger = logging.getLogger(__name__)

BlackBox = Callable[[MixedPoint], float]
JointBlackBox = Callable[[MixedPoint], Tuple[float, Sequence[float]]]


@dataclass(frozen=True)
class Problem:
    """Objective and inequality constraints (feasible iff g <= 0) over a mixed space.

    Equality constraints h(w) = 0 are turned into the pair h - eps <= 0 and
    -h - eps <= 0. ``evaluator`` returns f and every g at once and takes
    precedence over the separate callables.
    """

    name: str
    space: MixedSpace
    objective: Optional[BlackBox] = None
    constraints: Tuple[BlackBox, ...] = ()
    equalities: Tuple[BlackBox, ...] = ()
    equality_tol: float = 1e-4
    evaluator: Optional[JointBlackBox] = None
    n_outputs: Optional[int] = None
    reference_value: Optional[float] = None
    reference_point: Optional[MixedPoint] = None

    def __post_init__(self) -> None:
        if self.objective is None and self.evaluator is None:
            raise DomainError(f"problem {self.name!r} has neither objective nor evaluator")
        if self.equality_tol <= 0:
            raise DomainError("equality tolerance must be > 0")

    @property
    def n_constraints(self) -> int:
        if self.evaluator is not None and self.n_outputs is not None:
            return self.n_outputs
        return len(self.constraints) + 2 * len(self.equalities)

    @property
    def constrained(self) -> bool:
        return self.n_constraints > 0

    def evaluate(self, w: MixedPoint) -> Tuple[float, Tuple[float, ...]]:
        if self.evaluator is not None:
            f, g = self.evaluator(w)
            values = tuple(float(value) for value in g)
            if self.n_outputs is not None and len(values) != self.n_outputs:
                raise EvaluationError(
                    f"expected {self.n_outputs} constraint values, got {len(values)}"
                )
            return float(f), values
        assert self.objective is not None
        g: List[float] = [float(constraint(w)) for constraint in self.constraints]
        for equality in self.equalities:
            h = float(equality(w))
            g.extend([h - self.equality_tol, -h - self.equality_tol])
        return float(self.objective(w)), tuple(g)


@dataclass(frozen=True)
class KernelMode:
    """Kernel used for every surrogate of a run: full SE, KPLS(d) or adaptive KPLS."""

    kind: str = "full-se"
    n_components: Optional[int] = None
    adaptive: AdaptiveConfig = field(default_factory=AdaptiveConfig)

    def __post_init__(self) -> None:
        if self.kind not in {"full-se", "kpls", "kpls-auto"}:
            raise DomainError(f"unknown kernel mode {self.kind!r}")
        if self.kind == "kpls" and (self.n_components is None or self.n_components < 1):
            raise DomainError("KPLS needs a component count >= 1")

    @classmethod
    def full_se(cls) -> "KernelMode":
        return cls("full-se")

    @classmethod
    def kpls_fixed(cls, d: int) -> "KernelMode":
        return cls("kpls", n_components=d)

    @classmethod
    def kpls_auto(cls, adaptive: Optional[AdaptiveConfig] = None) -> "KernelMode":
        return cls("kpls-auto", adaptive=adaptive or AdaptiveConfig())

    @property
    def label(self) -> str:
        if self.kind == "full-se":
            return "krg"
        if self.kind == "kpls":
            return f"kpls:{self.n_components}"
        return "kpls-auto"


@dataclass(frozen=True)
class SegoConfig:
    doe_size: int = 5
    budget: int = 50
    kernel: KernelMode = field(default_factory=KernelMode)
    feasibility: FeasibilityMode = field(default_factory=FeasibilityMode)
    violation_tol: float = 1e-4
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    gp: GpOptions = field(default_factory=GpOptions)
    seed: int = 0
    record_wall_time: bool = False

    def __post_init__(self) -> None:
        if self.doe_size < 2:
            raise DomainError(f"initial DoE size must be >= 2, got {self.doe_size}")
        if self.budget < 0:
            raise DomainError(f"iteration budget must be >= 0, got {self.budget}")
        if not self.violation_tol > 0:
            raise DomainError("violation tolerance must be > 0")


@dataclass
class _Surrogates:
    objective: GpModel
    constraints: List[GpModel]
    d_f: Optional[int]
    d_g: Tuple[Optional[int], ...]
    traces: Dict[str, List[Tuple[int, float, Optional[float]]]]


def evaluate_point(
    problem: Problem,
    point: MixedPoint,
    index: int,
    iteration: int,
    tol: float,
    incumbent: Optional[float],
    record_wall_time: bool,
) -> Evaluation:
    """Evaluate one point; black-box failures become failed rows instead of raising."""
    started = time.perf_counter()
    try:
        f, g = problem.evaluate(point)
        if len(g) != problem.n_constraints:
            raise EvaluationError(f"expected {problem.n_constraints} constraints, got {len(g)}")
        failure: Optional[str] = None
    except Exception as exc:  # noqa: BLE001 - any black-box failure is recorded
        f, g = math.nan, tuple(math.nan for _ in range(problem.n_constraints))
        failure = str(exc) or exc.__class__.__name__
        logger.warning("Evaluation %d failed: %s", index, failure)
    wall_ms = (time.perf_counter() - started) * 1000.0 if record_wall_time else 0.0

    if failure is None and not all(math.isfinite(value) for value in (f, *g)):
        failure = f"non-finite output f={f} g={list(g)}"
        logger.warning("Evaluation %d failed: %s", index, failure)
    violation = total_violation(g) if failure is None else math.inf
    feasible = failure is None and violation <= tol
    if feasible and (incumbent is None or f < incumbent):
        incumbent = f
    return Evaluation(
        index=index,
        iteration=iteration,
        point=point,
        f=f,
        g=tuple(g),
        violation=violation,
        feasible=feasible,
        incumbent=incumbent,
        wall_ms=wall_ms,
        failed=failure is not None,
        message=failure,
    )


def reference_minimum(evaluations: Sequence[Evaluation], tol: float) -> Tuple[float, bool]:
    """f_min for EI: best feasible f, else the least-violating point's f (flagged True)."""
    usable = [item for item in evaluations if not item.failed]
    if not usable:
        raise DegenerateDataError("no successful evaluation to take f_min from")
    feasible = [item.f for item in usable if item.violation <= tol]
    if feasible:
        return min(feasible), False
    least = min(usable, key=lambda item: (item.violation, item.f))
    return least.f, True


def _fit_output(
    X: np.ndarray,
    y: np.ndarray,
    space: MixedSpace,
    cfg: SegoConfig,
    seed: int,
) -> Tuple[GpModel, Optional[int], List[ComponentTrial]]:
    mode = cfg.kernel
    if mode.kind == "full-se":
        model = fit_gp(X, y, KernelConfig.full_se(), space=space, options=cfg.gp, seed=seed)
        return model, None, []

    n_unique = int(np.unique(X, axis=0).shape[0])
    limit = max(1, min(relaxed_dim(space), n_unique - 1))
    trace: List[ComponentTrial] = []
    if mode.kind == "kpls":
        d = min(int(mode.n_components or 1), limit)
        if d != mode.n_components:
            logger.debug("KPLS components capped at %d for %d samples", d, n_unique)
    else:
        lower, upper = relaxed_bounds(space)
        scale = np.where(upper > lower, upper - lower, 1.0)
        adaptive = AdaptiveConfig(
            d_min=mode.adaptive.d_min,
            d_max=mode.adaptive.d_max,
            threshold=mode.adaptive.threshold,
            folds=mode.adaptive.folds,
            seed=seed,
            fold_starts=mode.adaptive.fold_starts,
            fold_evals_per_dim=mode.adaptive.fold_evals_per_dim,
            workers=mode.adaptive.workers,
        )
        try:
            d, trace = select_components((X - lower) / scale, y, adaptive)
        except (DomainError, DegenerateDataError, IllConditionedError) as exc:
            d = min(mode.adaptive.d_min, limit)
            logger.warning("Component selection skipped (%s); using d=%d", exc, d)
        d = min(d, limit)
    try:
        model = fit_gp(X, y, KernelConfig.kpls(d), space=space, options=cfg.gp, seed=seed)
    except DegenerateDataError as exc:
        logger.warning("PLS failed with d=%d (%s); falling back to d=1", d, exc)
        d = 1
        model = fit_gp(X, y, KernelConfig.kpls(1), space=space, options=cfg.gp, seed=seed)
    return model, d, trace


def _fit_surrogates(
    training: Sequence[Evaluation],
    space: MixedSpace,
    n_constraints: int,
    cfg: SegoConfig,
    seed: int,
) -> _Surrogates:
    X = relax_many([item.point for item in training], space)
    f = np.asarray([item.f for item in training])
    objective, d_f, trace_f = _fit_output(X, f, space, cfg, seed)
    traces = {"f": [(t.d, t.press, t.ratio) for t in trace_f]} if trace_f else {}
    constraints: List[GpModel] = []
    d_g: List[Optional[int]] = []
    for index in range(n_constraints):
        g = np.asarray([item.g[index] for item in training])
        model, d, trace = _fit_output(X, g, space, cfg, seed + index + 1)
        constraints.append(model)
        d_g.append(d)
        if trace:
            traces[f"g{index}"] = [(t.d, t.press, t.ratio) for t in trace]
    return _Surrogates(objective, constraints, d_f, tuple(d_g), traces)


def _choose_point(
    result: AcquisitionResult,
    space: MixedSpace,
    seen: Set[MixedPoint],
    rng: np.random.Generator,
) -> Tuple[MixedPoint, Optional[str]]:
    for rank, candidate in enumerate(result.candidates):
        point = project(candidate, space)
        if point not in seen:
            return point, None if rank == 0 else f"candidate:{rank}"
    for _ in range(100):
        point = lhs_sample(space, 1, int(rng.integers(2**31)))[0]
        if point not in seen:
            return point, "random"
    return point, "random-duplicate"


def optimize(
    problem: Problem,
    cfg: SegoConfig,
    *,
    method: Optional[str] = None,
) -> RunRecord:
    """Run SEGO: initial LHS design, then one surrogate-guided evaluation per iteration."""
    space = problem.space
    record = RunRecord(
        problem=problem.name,
        method=method or cfg.kernel.label,
        seed=cfg.seed,
        doe_size=cfg.doe_size,
        n_constraints=problem.n_constraints,
        violation_tol=cfg.violation_tol,
    )
    rng = np.random.default_rng(cfg.seed)
    incumbent: Optional[float] = None
    seen: Set[MixedPoint] = set()

    def append(point: MixedPoint, iteration: int) -> Evaluation:
        nonlocal incumbent
        if not contains(space, point):
            raise DomainError(f"proposed point {point.to_dict()} lies outside the space")
        evaluation = evaluate_point(
            problem, point, len(record.evaluations), iteration,
            cfg.violation_tol, incumbent, cfg.record_wall_time,
        )
        incumbent = evaluation.incumbent
        seen.add(point)
        record.evaluations.append(evaluation)
        return evaluation

    for point in lhs_sample(space, cfg.doe_size, cfg.seed):
        append(point, 0)
    logger.info(
        "%s: initial design of %d points, incumbent %s", problem.name, cfg.doe_size, incumbent
    )

    for iteration in range(1, cfg.budget + 1):
        seed = int(rng.integers(2**31))
        training = [item for item in record.evaluations if not item.failed]
        if len(training) < 2:
            point = lhs_sample(space, 1, seed)[0]
            logger.warning("Fewer than 2 successful evaluations; sampling at random")
            append(point, iteration)
            record.iterations.append(
                IterationInfo(iteration, None, (), None, None, fallback=True,
                              duplicate_guard="random")
            )
            continue

        surrogates = _fit_surrogates(training, space, problem.n_constraints, cfg, seed)
        f_min, flagged = reference_minimum(training, cfg.violation_tol)
        if flagged:
            logger.warning("No feasible point yet; f_min taken from the least violating point")
        result = maximize_acquisition(
            surrogates.objective,
            surrogates.constraints,
            space,
            f_min,
            cfg.acquisition,
            cfg.feasibility,
            seed,
        )
        point, guard = _choose_point(result, space, seen, rng)
        if guard is not None:
            logger.debug("Duplicate guard picked %s", guard)
        evaluation = append(point, iteration)
        record.iterations.append(
            IterationInfo(
                iteration=iteration,
                d_f=surrogates.d_f,
                d_g=surrogates.d_g,
                log_likelihood=surrogates.objective.log_likelihood,
                acq_value=result.value,
                fallback=result.fallback,
                fmin_infeasible=flagged,
                duplicate_guard=guard,
                component_traces=surrogates.traces,
            )
        )
        logger.info(
            "%s iter %d/%d: f=%.6g violation=%.3g incumbent=%s",
            problem.name, iteration, cfg.budget, evaluation.f, evaluation.violation,
            "none" if incumbent is None else f"{incumbent:.6g}",
        )
    return record


def final_objective_model(problem: Problem, record: RunRecord, cfg: SegoConfig) -> GpModel:
    """Objective surrogate refitted on every successful evaluation of a finished run."""
    training = [item for item in record.evaluations if not item.failed]
    if len(training) < 2:
        raise DegenerateDataError("need at least 2 successful evaluations to fit a model")
    X = relax_many([item.point for item in training], problem.space)
    y = np.asarray([item.f for item in training])
    model, _, _ = _fit_output(X, y, problem.space, cfg, cfg.seed)
    return model
