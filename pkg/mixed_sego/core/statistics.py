"""Repetition statistics: quartiles, boxplots, convergence curves, errors and data profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from mixed_sego.core.errors import StudyConfigError
from mixed_sego.core.models import RunRecord

ERROR_DENOMINATOR_FLOOR = 1e-12
DEFAULT_TOLERANCES = (0.02, 0.005)


@dataclass(frozen=True)
class BoxplotSummary:
    """Tukey boxplot; ``minimum``/``maximum`` are the whisker ends (extreme non-outliers)."""

    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    outliers: Tuple[float, ...] = ()
    count: int = 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
            "outliers": list(self.outliers),
            "count": self.count,
        }


@dataclass(frozen=True)
class CurvePoint:
    eval_index: int
    median: float
    q25: float
    q75: float
    n_runs: int


@dataclass(frozen=True)
class DataProfile:
    """Solved fraction per method for budgets 1..len(budgets)."""

    tolerance: float
    budgets: Tuple[int, ...]
    curves: Dict[str, Tuple[float, ...]] = field(default_factory=dict)

    def value(self, method: str, budget: int) -> float:
        curve = self.curves[method]
        if budget < 1:
            return 0.0
        return curve[min(budget, len(curve)) - 1]


def quartiles(values: Sequence[float]) -> Tuple[float, float, float]:
    """(q1, median, q3) with linear interpolation between order statistics."""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise ValueError("quartiles of an empty sample")
    q1, median, q3 = np.percentile(data, [25.0, 50.0, 75.0])
    return float(q1), float(median), float(q3)


def boxplot(values: Sequence[float]) -> BoxplotSummary:
    data = np.sort(np.asarray(values, dtype=float))
    q1, median, q3 = quartiles(data)
    iqr = q3 - q1
    low_fence = q1 - 1.5 * iqr
    high_fence = q3 + 1.5 * iqr
    inside = data[(data >= low_fence) & (data <= high_fence)]
    outliers = data[(data < low_fence) | (data > high_fence)]
    return BoxplotSummary(
        minimum=float(inside.min()),
        q1=q1,
        median=median,
        q3=q3,
        maximum=float(inside.max()),
        outliers=tuple(float(value) for value in outliers),
        count=int(data.size),
    )


def relative_error(best: float, reference: float) -> float:
    return (best - reference) / max(abs(reference), ERROR_DENOMINATOR_FLOOR)


def mean_error(errors: Sequence[Optional[float]]) -> Optional[float]:
    """Mean over runs that reached a feasible incumbent; None when no run did."""
    kept = [value for value in errors if value is not None and math.isfinite(value)]
    if not kept:
        return None
    return float(np.mean(kept))


def incumbent_matrix(histories: Sequence[Sequence[Optional[float]]]) -> np.ndarray:
    """Runs x evaluations; missing incumbents are +inf and short runs carry their last value."""
    length = max((len(history) for history in histories), default=0)
    matrix = np.full((len(histories), length), np.inf)
    for row, history in enumerate(histories):
        values = [np.inf if value is None else float(value) for value in history]
        if values:
            matrix[row, : len(values)] = values
            matrix[row, len(values) :] = values[-1]
    return matrix


def convergence_curve(histories: Sequence[Sequence[Optional[float]]]) -> List[CurvePoint]:
    """Median and quartiles of the incumbent traces per evaluation index.

    Quantiles are order statistics (no interpolation) so that the median stays
    non-increasing even while some runs have no feasible point yet.
    """
    matrix = incumbent_matrix(histories)
    lengths = [len(history) for history in histories]
    points: List[CurvePoint] = []
    for column in range(matrix.shape[1]):
        q25, median, q75 = np.quantile(matrix[:, column], [0.25, 0.5, 0.75],
                                       method="inverted_cdf")
        points.append(
            CurvePoint(
                eval_index=column,
                median=float(median),
                q25=float(q25),
                q75=float(q75),
                n_runs=sum(1 for length in lengths if length > column),
            )
        )
    return points


def solved_at(
    record: RunRecord,
    reference: float,
    tolerance: float,
    violation_tol: Optional[float] = None,
) -> Optional[int]:
    """Number of evaluations after which the run first reaches the tolerance."""
    limit = record.violation_tol if violation_tol is None else violation_tol
    denominator = max(abs(reference), ERROR_DENOMINATOR_FLOOR)
    for position, evaluation in enumerate(record.evaluations, start=1):
        if evaluation.failed or evaluation.violation > limit:
            continue
        if (evaluation.f - reference) / denominator <= tolerance:
            return position
    return None


def data_profile(
    records: Sequence[RunRecord],
    references: Mapping[str, float],
    tolerance: float,
    *,
    max_budget: Optional[int] = None,
    violation_tol: float = 1e-4,
) -> DataProfile:
    """Fraction of (problem, seed) instances of each method solved within each budget.

    The budget counts every evaluation, initial design included.
    """
    if tolerance < 0:
        raise StudyConfigError(f"tolerance must be >= 0, got {tolerance}")
    for record in records:
        if record.problem not in references or references[record.problem] is None:
            raise StudyConfigError(f"No reference value for problem {record.problem!r}")

    horizon = max_budget
    if horizon is None:
        horizon = max((len(record.evaluations) for record in records), default=0)
    budgets = tuple(range(1, horizon + 1))

    by_method: Dict[str, List[Optional[int]]] = {}
    for record in records:
        hit = solved_at(record, float(references[record.problem]), tolerance, violation_tol)
        by_method.setdefault(record.method, []).append(hit)

    curves: Dict[str, Tuple[float, ...]] = {}
    for method in sorted(by_method):
        hits = by_method[method]
        total = len(hits)
        curves[method] = tuple(
            sum(1 for hit in hits if hit is not None and hit <= budget) / total
            for budget in budgets
        )
    return DataProfile(tolerance=tolerance, budgets=budgets, curves=curves)
