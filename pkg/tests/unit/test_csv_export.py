from __future__ import annotations

import math
from pathlib import Path

import pytest

from mixed_sego.core.mixed_space import MixedSpace
from mixed_sego.core.models import Evaluation, IterationInfo, MixedPoint, RunRecord
from mixed_sego.core.statistics import CurvePoint, DataProfile
from mixed_sego.exporters.csv_export import (
    format_float,
    read_run_csv,
    render_run_csv,
    run_columns,
    write_curve_csv,
    write_profile_csv,
    write_run_csv,
)

SPACE = MixedSpace.build(continuous=[(0.0, 1.0)], integers=[[1, 2, 3]], categoricals=[2])


def _record() -> RunRecord:
    record = RunRecord("p", "kpls:1", 3, doe_size=2, n_constraints=1)
    rows = [
        (0, 0, MixedPoint.of([0.1], [1], [0]), 0.1, 0.3, False, None, False),
        (1, 0, MixedPoint.of([0.2], [2], [1]), 2.0 / 3.0, -0.1, True, 2.0 / 3.0, False),
        (2, 1, MixedPoint.of([0.3], [3], [0]), math.nan, math.nan, False, 2.0 / 3.0, True),
    ]
    for index, iteration, point, f, g, feasible, incumbent, failed in rows:
        record.evaluations.append(
            Evaluation(
                index=index,
                iteration=iteration,
                point=point,
                f=f,
                g=(g,),
                violation=math.inf if failed else max(g, 0.0),
                feasible=feasible,
                incumbent=incumbent,
                wall_ms=12.5,
                failed=failed,
            )
        )
    record.iterations.append(IterationInfo(1, 1, (1,), -3.0, 0.125))
    return record


def test_format_float_keeps_full_precision() -> None:
    assert format_float(None) == ""
    assert float(format_float(2.0 / 3.0)) == 2.0 / 3.0
    assert format_float(0.1) == "0.10000000000000001"


def test_run_columns_layout() -> None:
    assert run_columns(1, 1, 1, 2) == [
        "eval_index", "iter", "x0", "z0", "c0", "f", "g0", "g1",
        "violation", "feasible", "incumbent", "d_f", "d_g0", "d_g1", "acq_value", "wall_ms",
    ]


def test_render_run_csv_rows() -> None:
    lines = render_run_csv(_record(), SPACE).splitlines()
    assert lines[0] == (
        "eval_index,iter,x0,z0,c0,f,g0,violation,feasible,incumbent,d_f,d_g0,acq_value,wall_ms"
    )
    assert lines[1].split(",")[8:] == ["0", "", "", "", "", ""]
    last = lines[3].split(",")
    assert last[:2] == ["2", "1"]
    assert last[5] == "nan"
    assert last[10:13] == ["1", "1", "0.125"]
    assert last[13] == ""


def test_wall_time_column_is_opt_in() -> None:
    lines = render_run_csv(_record(), SPACE, wall_time=True).splitlines()
    assert all(line.endswith(",12.5") for line in lines[1:])


def test_write_and_read_run_csv(tmp_path: Path) -> None:
    path = write_run_csv(tmp_path / "nested" / "seed3.csv", _record(), SPACE)
    assert path.exists()
    loaded = read_run_csv(path, problem="p", method="kpls:1", seed=3)
    assert loaded.doe_size == 2
    assert loaded.n_constraints == 1
    assert [item.point for item in loaded.evaluations] == [
        item.point for item in _record().evaluations
    ]
    assert loaded.evaluations[1].f == 2.0 / 3.0
    assert loaded.evaluations[2].failed
    assert loaded.evaluations[2].violation == math.inf
    assert loaded.best_feasible == 2.0 / 3.0
    assert loaded.iterations[0].d_g == (1,)
    assert loaded.iterations[0].acq_value == 0.125


def test_write_curve_csv_blanks_missing_values(tmp_path: Path) -> None:
    path = write_curve_csv(
        tmp_path / "curve.csv",
        [CurvePoint(0, math.inf, 1.0, math.inf, 2), CurvePoint(1, 0.5, 0.25, 0.75, 2)],
    )
    assert path.read_text().splitlines() == [
        "eval_index,median,q25,q75,n_runs",
        "0,,1,,2",
        "1,0.5,0.25,0.75,2",
    ]


def test_write_profile_csv(tmp_path: Path) -> None:
    profile = DataProfile(0.02, (1, 2), {"random": (0.0, 0.5), "krg": (0.5, 1.0)})
    lines = write_profile_csv(tmp_path / "profile.csv", profile).read_text().splitlines()
    assert lines == ["budget,krg,random", "1,0.5,0", "2,1,0.5"]


@pytest.mark.parametrize("value", [0.0, -1.5, 1e-300, 123456789.123456789])
def test_format_float_round_trips(value: float) -> None:
    assert float(format_float(value)) == value


def test_read_run_csv_restores_only_exported_iteration_fields(tmp_path: Path) -> None:
    record = _record()
    record.iterations[0] = IterationInfo(
        1, 1, (1,), -3.0, 0.125, fallback=True, fmin_infeasible=True, duplicate_guard="random"
    )
    path = write_run_csv(tmp_path / "seed3.csv", record, SPACE)
    assert path.read_text().splitlines()[0].split(",") == run_columns(1, 1, 1, 1)

    info = read_run_csv(path).iterations[0]
    assert (info.d_f, info.d_g, info.acq_value) == (1, (1,), 0.125)
    assert info.log_likelihood is None
    assert not info.fallback
    assert not info.fmin_infeasible
    assert info.duplicate_guard is None
