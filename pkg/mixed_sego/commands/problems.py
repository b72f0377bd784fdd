"""Registered benchmark problems."""

from __future__ import annotations

from typing import Any, Dict, List

import typer
from rich.table import Table

from mixed_sego.commands.common import get_state, print_json_payload, reported_errors
from mixed_sego.core.benchmarks import register_suite
from mixed_sego.core.mixed_space import relaxed_dim
from mixed_sego.utils.formatting import format_space, format_value, problem_title


def list_problems_command(ctx: typer.Context) -> None:
    """List the benchmark problems with their spaces and reference optima."""
    state = get_state(ctx)
    with reported_errors(state):
        suite = register_suite()

    rows: List[Dict[str, Any]] = []
    for name in suite.names():
        problem = suite.problems[name]
        reference = suite.references[name]
        space = problem.space
        rows.append(
            {
                "name": name,
                "title": problem_title(name),
                "n": space.n,
                "m": space.m,
                "l": space.l,
                "relaxed_dim": relaxed_dim(space),
                "constraints": problem.n_constraints,
                "reference_value": reference.value,
                "reference_point": reference.point.to_dict(),
                "oracle": reference.oracle,
            }
        )

    if state.json_output:
        print_json_payload(state, {"status": "ok", "problems": rows})
        return
    if state.plain_output:
        for row in rows:
            typer.echo(
                f"{row['name']}\t{row['relaxed_dim']}\t{row['constraints']}\t"
                f"{row['reference_value']:.10g}"
            )
        return

    table = Table(title="Benchmark problems")
    table.add_column("Name")
    table.add_column("Title")
    table.add_column("Space")
    table.add_column("Constraints", justify="right")
    table.add_column("Reference optimum", justify="right")
    for name in suite.names():
        problem = suite.problems[name]
        table.add_row(
            name,
            problem_title(name),
            format_space(problem.space),
            str(problem.n_constraints),
            format_value(suite.references[name].value, digits=8),
        )
    state.console.print(table)
