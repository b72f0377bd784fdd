from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable, List

import numpy as np
import pytest
from typer.testing import CliRunner

from mixed_sego.core.mixed_space import MixedSpace
from mixed_sego.core.models import Evaluation, MixedPoint, RunRecord, total_violation
from mixed_sego.core.sego import Problem


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture()
def mixed_space() -> MixedSpace:
    return MixedSpace.build(
        continuous=[(-1.0, 1.0)],
        integers=[[0, 2, 5, 9]],
        categoricals=[3, 4],
    )


@pytest.fixture()
def quadratic_problem() -> Problem:
    """Cheap mixed problem: one continuous, one integer and one binary categorical."""
    space = MixedSpace.build(
        continuous=[(-2.0, 2.0)],
        integers=[list(range(0, 5))],
        categoricals=[2],
    )
    return Problem(
        name="quadratic",
        space=space,
        objective=lambda w: (w.x[0] - 0.5) ** 2 + (w.z[0] - 2) ** 2 + 3.0 * w.c[0],
        reference_value=0.0,
        reference_point=MixedPoint.of([0.5], [2], [0]),
    )


@pytest.fixture()
def constrained_problem() -> Problem:
    space = MixedSpace.build(continuous=[(0.0, 1.0), (0.0, 1.0)], categoricals=[2])
    return Problem(
        name="disk",
        space=space,
        objective=lambda w: w.x[0] + w.x[1] + 0.5 * w.c[0],
        constraints=(lambda w: 0.25 - w.x[0] * w.x[1],),
    )


@pytest.fixture()
def make_record() -> Callable[..., RunRecord]:
    """Build a run record from objective values (and optional constraint values)."""

    def _make(
        values: List[float],
        *,
        problem: str = "p",
        method: str = "krg",
        seed: int = 0,
        g: List[float] | None = None,
        tol: float = 1e-4,
    ) -> RunRecord:
        record = RunRecord(problem, method, seed, doe_size=min(2, len(values)),
                           n_constraints=0 if g is None else 1, violation_tol=tol)
        incumbent = None
        for index, f in enumerate(values):
            gs = () if g is None else (g[index],)
            violation = total_violation(gs)
            feasible = violation <= tol
            if feasible and (incumbent is None or f < incumbent):
                incumbent = f
            record.evaluations.append(
                Evaluation(
                    index=index,
                    iteration=max(0, index - 1),
                    point=MixedPoint.of([float(index)]),
                    f=f,
                    g=gs,
                    violation=violation,
                    feasible=feasible,
                    incumbent=incumbent,
                )
            )
        return record

    return _make


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture()
def write_temp_json(tmp_path: Path):
    def _write(name: str, payload: Any) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return path

    return _write


@pytest.fixture()
def write_temp_toml(tmp_path: Path):
    def _write(name: str, content: str) -> Path:
        path = tmp_path / name
        path.write_text(content.strip() + "\n")
        return path

    return _write
