"""Repeated-run study command."""

from __future__ import annotations

import os
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Optional

import typer
from rich.table import Table

from mixed_sego.commands.common import get_state, print_json_payload, reported_errors
from mixed_sego.core.config import resolve_workers
from mixed_sego.core.study import load_study_config, run_study
from mixed_sego.utils.formatting import format_percent, method_title, problem_title


def _output_override(out: Optional[Path]) -> Optional[Path]:
    if out is not None:
        return out.expanduser().resolve()
    env_dir = os.getenv("MIXED_SEGO_OUTPUT_DIR")
    return Path(env_dir).expanduser().resolve() if env_dir else None


def study_command(
    ctx: typer.Context,
    config: Path = typer.Option(..., "--config", help="Study file (JSON or YAML)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    workers: Optional[int] = typer.Option(
        None, "--workers", min=0, help="Parallel runs (0 = CPU count)"
    ),
) -> None:
    """Run every (problem, method, DoE, seed) combination and aggregate the results."""
    state = get_state(ctx)
    with reported_errors(state):
        study_cfg = load_study_config(
            config.expanduser(), state.config, output_dir=_output_override(out)
        )
        width = resolve_workers(state.config, workers if workers is not None else study_cfg.workers)
        study_cfg = replace(study_cfg, workers=width)
        summary = run_study(study_cfg, state.config)

    payload: Dict[str, Any] = {
        "status": "ok" if not summary["failed"] else "partial",
        "output_dir": str(study_cfg.output_dir),
        "runs": len(summary["runs"]),
        "failed": len(summary["failed"]),
        "mean_errors": summary["mean_errors"],
        "profiles": summary["profiles"],
    }
    if state.json_output:
        print_json_payload(state, payload)
        return
    if state.plain_output:
        for row in summary["mean_errors"]:
            error = row["mean_error"]
            typer.echo(
                f"{row['problem']}\t{row['method']}\tdoe{row['doe']}\t"
                f"{'' if error is None else error}\t{row['n_feasible']}/{row['n_runs']}"
            )
        typer.echo(f"output\t{study_cfg.output_dir}")
        return

    table = Table(title=f"Study results ({payload['runs']} runs)")
    table.add_column("Problem")
    table.add_column("Method")
    table.add_column("DoE", justify="right")
    table.add_column("Mean error", justify="right")
    table.add_column("Feasible runs", justify="right")
    for row in summary["mean_errors"]:
        table.add_row(
            problem_title(row["problem"]),
            method_title(row["method"]),
            str(row["doe"]),
            format_percent(row["mean_error"]),
            f"{row['n_feasible']}/{row['n_runs']}",
        )
    state.console.print(table)
    if summary["failed"]:
        state.console.print(f"[yellow]{len(summary['failed'])} run(s) failed.[/yellow]")
    state.console.print(f"Results written to {study_cfg.output_dir}")
