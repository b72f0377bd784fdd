"""Shared command helpers."""

from __future__ import annotations

import json
from contextlib import contextmanager
from typing import Any, Iterator, NoReturn

import typer
from rich.markup import escape

from mixed_sego.core.config import ConfigError
from mixed_sego.core.constants import EXIT_CONFIG_ERROR, EXIT_RUNTIME_ERROR
from mixed_sego.core.errors import MixedSegoError, StudyConfigError
from mixed_sego.core.state import CLIState


def get_state(ctx: typer.Context) -> CLIState:
    """Extract validated CLI state from Typer context."""
    state = ctx.obj
    if not isinstance(state, CLIState):
        raise typer.Exit(code=2)
    return state


def print_json_payload(state: CLIState, payload: Any) -> None:
    """Print JSON payload with plain-mode fallback for piping."""
    if state.plain_output:
        typer.echo(json.dumps(payload, separators=(",", ":"), sort_keys=True))
        return
    state.console.print_json(data=payload)


def error_and_exit(state: CLIState, message: str, code: int = EXIT_RUNTIME_ERROR) -> NoReturn:
    mode = state.output_mode
    if mode == "json":
        print_json_payload(state, {"status": "error", "message": message})
    elif mode == "plain":
        typer.echo(f"error\t{message}")
    else:
        state.console.print(f"[red]Error:[/red] {escape(message)}")
    raise typer.Exit(code=code)


@contextmanager
def reported_errors(state: CLIState) -> Iterator[None]:
    """Turn library errors into the CLI error format and exit code."""
    try:
        yield
    except (ConfigError, StudyConfigError) as exc:
        error_and_exit(state, str(exc), EXIT_CONFIG_ERROR)
    except MixedSegoError as exc:
        error_and_exit(state, str(exc), EXIT_RUNTIME_ERROR)
