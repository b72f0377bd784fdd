"""Lightweight data models used across the optimizer and the harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple


@dataclass(frozen=True)
class MixedPoint:
    """A point w = (x, z, c) of a mixed design space."""

    x: Tuple[float, ...] = ()
    z: Tuple[int, ...] = ()
    c: Tuple[int, ...] = ()

    @classmethod
    def of(
        cls,
        x: Sequence[float] = (),
        z: Sequence[int] = (),
        c: Sequence[int] = (),
    ) -> "MixedPoint":
        return cls(
            x=tuple(float(value) for value in x),
            z=tuple(int(value) for value in z),
            c=tuple(int(value) for value in c),
        )

    def to_dict(self) -> Dict[str, List[Any]]:
        return {"x": list(self.x), "z": list(self.z), "c": list(self.c)}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "MixedPoint":
        return cls.of(payload.get("x", []), payload.get("z", []), payload.get("c", []))


@dataclass(frozen=True)
class Evaluation:
    """One row of the evaluation log of a run."""

    index: int
    iteration: int
    point: MixedPoint
    f: float
    g: Tuple[float, ...]
    violation: float
    feasible: bool
    incumbent: Optional[float]
    wall_ms: float = 0.0
    failed: bool = False
    message: Optional[str] = None


@dataclass(frozen=True)
class IterationInfo:
    """Model metadata gathered while proposing one point.

    The run CSV stores only ``d_f``, ``d_g`` and ``acq_value``. ``fallback``,
    ``fmin_infeasible``, ``duplicate_guard``, ``log_likelihood`` and the component
    traces live on the in-memory record and come back as defaults from ``read_run_csv``.
    """

    iteration: int
    d_f: Optional[int]
    d_g: Tuple[Optional[int], ...]
    log_likelihood: Optional[float]
    acq_value: Optional[float]
    fallback: bool = False
    fmin_infeasible: bool = False
    duplicate_guard: Optional[str] = None
    component_traces: Dict[str, List[Tuple[int, float, Optional[float]]]] = field(
        default_factory=dict
    )


@dataclass
class RunRecord:
    """Complete trajectory of one optimization run."""

    problem: str
    method: str
    seed: int
    doe_size: int
    n_constraints: int
    evaluations: List[Evaluation] = field(default_factory=list)
    iterations: List[IterationInfo] = field(default_factory=list)
    violation_tol: float = 1e-4

    @property
    def incumbent_history(self) -> List[Optional[float]]:
        return [item.incumbent for item in self.evaluations]

    @property
    def best_feasible(self) -> Optional[float]:
        values = [item.incumbent for item in self.evaluations if item.incumbent is not None]
        return values[-1] if values else None

    @property
    def best_evaluation(self) -> Optional[Evaluation]:
        feasible = [item for item in self.evaluations if item.feasible and not item.failed]
        if not feasible:
            return None
        return min(feasible, key=lambda item: (item.f, item.index))

    @property
    def infeasible(self) -> bool:
        return self.best_feasible is None

    def iteration_info(self, iteration: int) -> Optional[IterationInfo]:
        for info in self.iterations:
            if info.iteration == iteration:
                return info
        return None


def total_violation(g: Sequence[float]) -> float:
    """Sum of positive parts of inequality constraint values."""
    total = 0.0
    for value in g:
        if math.isnan(value):
            return math.inf
        total += max(float(value), 0.0)
    return total
