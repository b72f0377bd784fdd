"""CSV formats: per-run evaluation logs, convergence curves and data profiles."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from mixed_sego.core.mixed_space import MixedSpace
from mixed_sego.core.models import Evaluation, IterationInfo, MixedPoint, RunRecord
from mixed_sego.core.statistics import CurvePoint, DataProfile
from mixed_sego.exporters.json_export import write_text_atomic


def format_float(value: Optional[float]) -> str:
    """17 significant digits; empty for missing values."""
    if value is None:
        return ""
    return format(float(value), ".17g")


def _parse_float(text: str) -> Optional[float]:
    return None if text == "" else float(text)


def _parse_int(text: str) -> Optional[int]:
    return None if text == "" else int(text)


def run_columns(n: int, m: int, l: int, n_constraints: int) -> List[str]:  # noqa: E741
    columns = ["eval_index", "iter"]
    columns.extend(f"x{index}" for index in range(n))
    columns.extend(f"z{index}" for index in range(m))
    columns.extend(f"c{index}" for index in range(l))
    columns.append("f")
    columns.extend(f"g{index}" for index in range(n_constraints))
    columns.extend(["violation", "feasible", "incumbent", "d_f"])
    columns.extend(f"d_g{index}" for index in range(n_constraints))
    columns.extend(["acq_value", "wall_ms"])
    return columns


def _run_row(
    evaluation: Evaluation,
    info: Optional[IterationInfo],
    n_constraints: int,
    wall_time: bool,
) -> Dict[str, str]:
    row: Dict[str, str] = {
        "eval_index": str(evaluation.index),
        "iter": str(evaluation.iteration),
    }
    point = evaluation.point
    row.update({f"x{index}": format_float(value) for index, value in enumerate(point.x)})
    row.update({f"z{index}": str(value) for index, value in enumerate(point.z)})
    row.update({f"c{index}": str(value) for index, value in enumerate(point.c)})
    row["f"] = format_float(evaluation.f)
    row.update({f"g{index}": format_float(value) for index, value in enumerate(evaluation.g)})
    row["violation"] = format_float(evaluation.violation)
    row["feasible"] = "1" if evaluation.feasible else "0"
    row["incumbent"] = format_float(evaluation.incumbent)
    d_g = info.d_g if info is not None else ()
    row["d_f"] = "" if info is None or info.d_f is None else str(info.d_f)
    for index in range(n_constraints):
        value = d_g[index] if index < len(d_g) else None
        row[f"d_g{index}"] = "" if value is None else str(value)
    row["acq_value"] = format_float(info.acq_value) if info is not None else ""
    row["wall_ms"] = format_float(evaluation.wall_ms) if wall_time else ""
    return row


def render_run_csv(record: RunRecord, space: MixedSpace, *, wall_time: bool = False) -> str:
    columns = run_columns(space.n, space.m, space.l, record.n_constraints)
    infos = {info.iteration: info for info in record.iterations}
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for evaluation in record.evaluations:
        # The initial design rows share iteration 0 and carry no model metadata.
        info = infos.get(evaluation.iteration) if evaluation.iteration > 0 else None
        writer.writerow(_run_row(evaluation, info, record.n_constraints, wall_time))
    return buffer.getvalue()


def write_run_csv(
    path: Path, record: RunRecord, space: MixedSpace, *, wall_time: bool = False
) -> Path:
    return write_text_atomic(path, render_run_csv(record, space, wall_time=wall_time))


def _count(columns: Sequence[str], prefix: str) -> int:
    return sum(1 for name in columns if name.startswith(prefix) and name[len(prefix) :].isdigit())


def read_run_csv(
    path: Path,
    *,
    problem: str = "",
    method: str = "",
    seed: int = 0,
    violation_tol: float = 1e-4,
) -> RunRecord:
    """Rebuild a run record from its CSV log (failed rows have a NaN objective).

    Iteration metadata without a CSV column, such as the acquisition fallback flag,
    is not restored.
    """
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        columns = list(reader.fieldnames or [])
        rows = list(reader)

    n, m, l = _count(columns, "x"), _count(columns, "z"), _count(columns, "c")  # noqa: E741
    n_constraints = _count(columns, "g")
    record = RunRecord(
        problem=problem,
        method=method,
        seed=seed,
        doe_size=0,
        n_constraints=n_constraints,
        violation_tol=violation_tol,
    )
    for row in rows:
        iteration = int(row["iter"])
        f = float(row["f"])
        point = MixedPoint.of(
            [float(row[f"x{index}"]) for index in range(n)],
            [int(row[f"z{index}"]) for index in range(m)],
            [int(row[f"c{index}"]) for index in range(l)],
        )
        record.evaluations.append(
            Evaluation(
                index=int(row["eval_index"]),
                iteration=iteration,
                point=point,
                f=f,
                g=tuple(float(row[f"g{index}"]) for index in range(n_constraints)),
                violation=float(row["violation"]),
                feasible=row["feasible"] == "1",
                incumbent=_parse_float(row["incumbent"]),
                wall_ms=_parse_float(row["wall_ms"]) or 0.0,
                failed=math.isnan(f),
            )
        )
        if iteration == 0:
            record.doe_size += 1
            continue
        d_g = tuple(_parse_int(row[f"d_g{index}"]) for index in range(n_constraints))
        acq_value = _parse_float(row["acq_value"])
        d_f = _parse_int(row["d_f"])
        if acq_value is not None or d_f is not None:
            record.iterations.append(IterationInfo(iteration, d_f, d_g, None, acq_value))
    return record


def write_curve_csv(path: Path, points: Sequence[CurvePoint]) -> Path:
    buffer = io.StringIO()
    writer = csv.DictWriter(
        buffer, fieldnames=["eval_index", "median", "q25", "q75", "n_runs"], lineterminator="\n"
    )
    writer.writeheader()
    for point in points:
        writer.writerow(
            {
                "eval_index": point.eval_index,
                "median": _finite_or_empty(point.median),
                "q25": _finite_or_empty(point.q25),
                "q75": _finite_or_empty(point.q75),
                "n_runs": point.n_runs,
            }
        )
    return write_text_atomic(path, buffer.getvalue())


def _finite_or_empty(value: float) -> str:
    return format_float(value) if math.isfinite(value) else ""


def write_profile_csv(path: Path, profile: DataProfile) -> Path:
    methods = sorted(profile.curves)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=["budget", *methods], lineterminator="\n")
    writer.writeheader()
    for position, budget in enumerate(profile.budgets):
        row: Dict[str, str] = {"budget": str(budget)}
        for method in methods:
            row[method] = format_float(profile.curves[method][position])
        writer.writerow(row)
    return write_text_atomic(path, buffer.getvalue())
