"""Entry point for mixed-sego."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from mixed_sego import __version__
from mixed_sego.commands.common import error_and_exit
from mixed_sego.commands.optimize import optimize_command
from mixed_sego.commands.problems import list_problems_command
from mixed_sego.commands.profile import profile_command
from mixed_sego.commands.study import study_command
from mixed_sego.core.config import ConfigError, default_config_path, load_config
from mixed_sego.core.constants import EXIT_CONFIG_ERROR
from mixed_sego.core.state import CLIState

app = typer.Typer(
    add_completion=False,
    help="Constrained Bayesian optimization over mixed continuous/integer/categorical spaces",
    invoke_without_command=True,
)


def _configure_logging(state: CLIState) -> None:
    """Route the package logger through rich on stderr."""
    level = state.log_level
    logger = logging.getLogger("mixed_sego")
    logger.setLevel(level)
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(
        console=Console(stderr=True, no_color=state.plain_output),
        show_time=False,
        show_path=False,
        markup=False,
    )
    handler.setLevel(level)
    logger.addHandler(handler)


@app.callback()
def main_callback(
    ctx: typer.Context,
    json_output: bool = typer.Option(False, "--json", help="Print results as JSON"),
    plain_output: bool = typer.Option(
        False,
        "--plain",
        help="Tab-separated results without tables or colour",
    ),
    config: Optional[Path] = typer.Option(None, "--config", help="Config file (TOML or JSON)"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log optimizer progress"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Only log errors"),
    version: bool = typer.Option(False, "--version", help="Show version and exit"),
) -> None:
    """Load the configuration and set up output and logging for the sub-command."""
    if version:
        typer.echo(__version__)
        raise typer.Exit(code=0)
    if json_output and plain_output:
        typer.echo("Options --json and --plain are mutually exclusive.")
        raise typer.Exit(code=EXIT_CONFIG_ERROR)

    state = CLIState(
        json_output=json_output,
        plain_output=plain_output,
        verbose=verbose,
        quiet=quiet,
        config_path=(config or default_config_path()).expanduser().resolve(),
        config={},
        console=Console(quiet=quiet, no_color=plain_output, log_time=False, log_path=False),
    )
    try:
        state.config = load_config(state.config_path)
    except ConfigError as exc:
        error_and_exit(state, f"Config error: {exc}", EXIT_CONFIG_ERROR)
    ctx.obj = state
    _configure_logging(state)

    if ctx.invoked_subcommand is None:
        typer.echo(ctx.get_help())
        raise typer.Exit(code=0)


app.command("optimize")(optimize_command)
app.command("study")(study_command)
app.command("profile")(profile_command)
app.command("list-problems")(list_problems_command)


def main() -> None:
    """Console script entrypoint."""
    app()


if __name__ == "__main__":
    main()
