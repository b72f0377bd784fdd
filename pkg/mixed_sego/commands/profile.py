"""Data-profile command over a directory of run logs."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Optional

import typer
from rich.table import Table

from mixed_sego.commands.common import (
    error_and_exit,
    get_state,
    print_json_payload,
    reported_errors,
)
from mixed_sego.core.benchmarks import register_suite
from mixed_sego.core.constants import EXIT_CONFIG_ERROR
from mixed_sego.core.models import RunRecord
from mixed_sego.core.statistics import data_profile
from mixed_sego.core.study import run_settings
from mixed_sego.exporters.csv_export import read_run_csv, write_profile_csv
from mixed_sego.utils.formatting import format_percent, method_title
from mixed_sego.utils.parsing import discover_run_logs, parse_references

logger = logging.getLogger(__name__)


def _suite_references(problems: List[str]) -> Dict[str, float]:
    if not problems:
        return {}
    suite = register_suite()
    references: Dict[str, float] = {}
    for name in problems:
        problem = suite.problems.get(name)
        if problem is not None and problem.reference_value is not None:
            references[name] = problem.reference_value
    return references


def profile_command(
    ctx: typer.Context,
    runs: Path = typer.Option(..., "--runs", help="Directory holding per-run CSV logs"),
    tol: float = typer.Option(0.02, "--tol", min=0.0, help="Relative error tolerance"),
    out: Path = typer.Option(..., "--out", help="Output CSV path"),
    reference: Optional[List[str]] = typer.Option(
        None, "--reference", help="Reference optimum as name=value (repeatable)"
    ),
    max_budget: Optional[int] = typer.Option(
        None, "--max-budget", min=1, help="Last budget of the profile (default: longest run)"
    ),
) -> None:
    """Fraction of runs of each method solved within every evaluation budget."""
    state = get_state(ctx)
    try:
        explicit = parse_references(reference or [])
    except ValueError as exc:
        error_and_exit(state, str(exc), EXIT_CONFIG_ERROR)

    root = runs.expanduser()
    if not root.is_dir():
        error_and_exit(state, f"Run directory not found: {root}", EXIT_CONFIG_ERROR)
    logs = discover_run_logs(root)
    if not logs:
        error_and_exit(state, f"No run logs found under {root}", EXIT_CONFIG_ERROR)

    with reported_errors(state):
        settings = run_settings(state.config)
        problems = sorted({log.problem for log in logs})
        unknown = [name for name in problems if name not in explicit]
        references = {**_suite_references(unknown), **explicit}
        records: List[RunRecord] = [
            read_run_csv(
                log.path,
                problem=log.problem,
                method=log.method.label,
                seed=log.seed,
                violation_tol=settings.violation_tol,
            )
            for log in logs
        ]
        logger.info("Profiling %d runs from %s", len(records), root)
        profile = data_profile(
            records,
            references,
            tol,
            max_budget=max_budget,
            violation_tol=settings.violation_tol,
        )
        path = write_profile_csv(out.expanduser(), profile)

    final = {method: curve[-1] if curve else 0.0 for method, curve in profile.curves.items()}
    if state.json_output:
        print_json_payload(
            state,
            {
                "status": "ok",
                "tolerance": tol,
                "runs": len(records),
                "budgets": len(profile.budgets),
                "solved": final,
                "output": str(path),
            },
        )
        return
    if state.plain_output:
        for method, fraction in sorted(final.items()):
            typer.echo(f"{method}\t{fraction:.6g}")
        typer.echo(f"output\t{path}")
        return

    table = Table(title=f"Data profile at tolerance {tol:g}")
    table.add_column("Method")
    table.add_column("Solved", justify="right")
    for method, fraction in sorted(final.items()):
        table.add_row(method_title(method), format_percent(fraction))
    state.console.print(table)
    state.console.print(f"Profile written to {path}")
