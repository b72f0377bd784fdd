"""Runtime state shared by the CLI commands through ``ctx.obj``."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict

from rich.console import Console


@dataclass
class CLIState:
    """Output mode flags, the merged configuration and the console to render on."""

    json_output: bool
    plain_output: bool
    verbose: bool
    quiet: bool
    config_path: Path
    config: Dict[str, Any]
    console: Console

    @property
    def output_mode(self) -> str:
        if self.json_output:
            return "json"
        return "plain" if self.plain_output else "rich"

    @property
    def log_level(self) -> int:
        if self.quiet:
            return logging.ERROR
        return logging.INFO if self.verbose else logging.WARNING
