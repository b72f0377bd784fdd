"""Single optimization run command."""

from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Optional

import typer
from rich.table import Table

from mixed_sego.commands.common import (
    error_and_exit,
    get_state,
    print_json_payload,
    reported_errors,
)
from mixed_sego.core.config import resolve_output_dir
from mixed_sego.core.constants import EXIT_CONFIG_ERROR, RUN_FILE_TEMPLATE
from mixed_sego.core.gp import model_to_dict
from mixed_sego.core.sego import SegoConfig, final_objective_model
from mixed_sego.core.statistics import relative_error
from mixed_sego.core.study import (
    default_feasibility,
    execute_method,
    kernel_mode,
    run_settings,
)
from mixed_sego.exporters.csv_export import write_run_csv
from mixed_sego.exporters.json_export import write_json
from mixed_sego.utils.formatting import format_percent, format_space, format_value, method_title
from mixed_sego.utils.parsing import parse_feasibility, parse_method, resolve_problem

logger = logging.getLogger(__name__)


def optimize_command(
    ctx: typer.Context,
    problem: str = typer.Option(..., "--problem", help="Registered problem name or JSON/YAML file"),
    method: str = typer.Option("krg", "--method", help="krg|kpls:<d>|kpls-auto|ga|random"),
    doe: Optional[int] = typer.Option(None, "--doe", help="Initial DoE size (default from config)"),
    budget: Optional[int] = typer.Option(
        None, "--budget", help="Iterations after the DoE (default from config)"
    ),
    seed: int = typer.Option(0, "--seed", help="Random seed"),
    feasibility: Optional[str] = typer.Option(
        None, "--feasibility", help="mean|utb:<kappa> (default: utb for analytical constrained)"
    ),
    acquisition: Optional[str] = typer.Option(None, "--acquisition", help="ei|wb2|wb2s"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory for the run CSV"),
    wall_time: bool = typer.Option(False, "--wall-time", help="Record wall times in the CSV"),
    dump_model: Optional[Path] = typer.Option(
        None, "--dump-model", help="Write the final objective model as JSON"
    ),
) -> None:
    """Run one optimization and write its evaluation log."""
    state = get_state(ctx)
    try:
        spec = parse_method(method)
    except ValueError as exc:
        error_and_exit(state, str(exc), EXIT_CONFIG_ERROR)

    sego_cfg = state.config.get("sego", {})
    doe_size = int(doe if doe is not None else sego_cfg.get("doe_size", 5))
    iterations = int(budget if budget is not None else sego_cfg.get("budget", 50))
    if doe_size < 2 or iterations < 0:
        error_and_exit(state, "--doe must be >= 2 and --budget >= 0", EXIT_CONFIG_ERROR)

    with reported_errors(state):
        settings = run_settings(state.config, acquisition)
        if wall_time:
            settings = replace(
                settings, wall_time=True, ga=replace(settings.ga, record_wall_time=True)
            )
        try:
            mode = parse_feasibility(feasibility, settings.utb_kappa) if feasibility else None
        except ValueError as exc:
            error_and_exit(state, str(exc), EXIT_CONFIG_ERROR)
        target = resolve_problem(problem)
        mode = mode or default_feasibility(target, settings)
        record = execute_method(target, spec, doe_size, iterations, seed, settings, mode)

        out_dir = resolve_output_dir(state.config, out)
        path = out_dir / RUN_FILE_TEMPLATE.format(
            problem=target.name, method=spec.slug, doe=doe_size, seed=seed
        )
        write_run_csv(path, record, target.space, wall_time=settings.wall_time)
        logger.info("Run log written to %s", path)

        model_path: Optional[Path] = None
        if dump_model is not None:
            sego = SegoConfig(
                doe_size=doe_size,
                budget=iterations,
                kernel=kernel_mode(spec, settings.adaptive),
                gp=settings.gp,
                seed=seed,
            )
            model = final_objective_model(target, record, sego)
            model_path = write_json(dump_model, model_to_dict(model))

    best = record.best_feasible
    reference = target.reference_value
    payload: Dict[str, Any] = {
        "status": "ok",
        "problem": target.name,
        "method": spec.label,
        "seed": seed,
        "doe": doe_size,
        "budget": iterations,
        "feasibility": mode.label,
        "evaluations": len(record.evaluations),
        "failed_evaluations": sum(1 for item in record.evaluations if item.failed),
        "best_feasible": best,
        "infeasible": record.infeasible,
        "reference": reference,
        "error": None if best is None or reference is None else relative_error(best, reference),
        "output": str(path),
        "model": str(model_path) if model_path else None,
    }

    if state.json_output:
        print_json_payload(state, payload)
        return
    if state.plain_output:
        for key in sorted(payload):
            typer.echo(f"{key}\t{payload[key]}")
        return

    table = Table(title=f"{target.name} - {method_title(spec.label)} (seed {seed})")
    table.add_column("Field")
    table.add_column("Value")
    table.add_row("Space", format_space(target.space))
    table.add_row("Evaluations", str(payload["evaluations"]))
    table.add_row("Failed evaluations", str(payload["failed_evaluations"]))
    table.add_row("Best feasible", format_value(best))
    table.add_row("Reference", format_value(reference))
    table.add_row("Relative error", format_percent(payload["error"]))
    table.add_row("Feasibility", mode.label)
    table.add_row("Run log", str(path))
    if model_path:
        table.add_row("Model", str(model_path))
    state.console.print(table)
    if record.infeasible:
        state.console.print("[yellow]No feasible point was found.[/yellow]")
