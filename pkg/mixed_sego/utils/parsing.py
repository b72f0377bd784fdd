"""Parsing helpers for CLI arguments, problem files and study files."""

from __future__ import annotations

import json
import re
import shlex
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import yaml

from mixed_sego.core.acquisition import FeasibilityMode
from mixed_sego.core.benchmarks import register_suite
from mixed_sego.core.blackbox import ExternalBlackBox
from mixed_sego.core.constants import BASELINE_METHODS, SURROGATE_METHODS
from mixed_sego.core.errors import DomainError, StudyConfigError
from mixed_sego.core.mixed_space import MixedSpace
from mixed_sego.core.sego import Problem

_KPLS_PATTERN = re.compile(r"^kpls[:\-](\d+)$")


@dataclass(frozen=True)
class MethodSpec:
    """A method token: ``krg``, ``kpls:<d>``, ``kpls-auto``, ``ga`` or ``random``."""

    kind: str
    n_components: Optional[int] = None

    @property
    def label(self) -> str:
        return f"kpls:{self.n_components}" if self.kind == "kpls" else self.kind

    @property
    def slug(self) -> str:
        """File-system safe label (no colon)."""
        return f"kpls-{self.n_components}" if self.kind == "kpls" else self.kind

    @property
    def is_surrogate(self) -> bool:
        return self.kind in SURROGATE_METHODS


def parse_method(value: str) -> MethodSpec:
    """Parse a method token; ``kpls-<d>`` (the slug form) is accepted too."""
    raw = value.strip().lower()
    if raw != "kpls" and raw in SURROGATE_METHODS | BASELINE_METHODS:
        return MethodSpec(raw)
    match = _KPLS_PATTERN.match(raw)
    if match:
        d = int(match.group(1))
        if d < 1:
            raise ValueError("kpls:<d> needs d >= 1")
        return MethodSpec("kpls", d)
    raise ValueError(
        f"Unsupported method: {value!r} (expected krg|kpls:<d>|kpls-auto|ga|random)"
    )


def parse_feasibility(value: str, default_kappa: float = 3.0) -> FeasibilityMode:
    """Parse ``mean``, ``utb`` or ``utb:<kappa>``."""
    raw = value.strip().lower()
    if raw == "mean":
        return FeasibilityMode.mean()
    if raw == "utb":
        return FeasibilityMode.utb(default_kappa)
    if raw.startswith("utb:"):
        try:
            kappa = float(raw[4:])
        except ValueError as exc:
            raise ValueError(f"Invalid UTB multiplier in {value!r}") from exc
        if kappa <= 0:
            raise ValueError("UTB multiplier must be > 0")
        return FeasibilityMode.utb(kappa)
    raise ValueError(f"Unsupported feasibility mode: {value!r} (expected mean|utb:<kappa>)")


def parse_references(values: Sequence[str]) -> Dict[str, float]:
    """Parse repeated ``name=value`` options."""
    references: Dict[str, float] = {}
    for item in values:
        name, sep, number = item.partition("=")
        if not sep or not name.strip():
            raise ValueError(f"Reference must look like name=value, got {item!r}")
        try:
            references[name.strip()] = float(number)
        except ValueError as exc:
            raise ValueError(f"Reference value for {name!r} is not a number") from exc
    return references


def load_document(path: Path) -> Any:
    """Read a JSON or YAML document chosen by suffix."""
    text = path.read_text()
    try:
        if path.suffix.lower() in {".yaml", ".yml"}:
            return yaml.safe_load(text)
        return json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise StudyConfigError(f"Could not parse {path}: {exc}") from exc


def problem_from_document(payload: Dict[str, Any]) -> Problem:
    """Build an external black-box problem from a problem document."""
    if not isinstance(payload, dict):
        raise StudyConfigError("Problem document must be an object")
    try:
        name = str(payload["name"])
        space = MixedSpace.from_dict(payload["space"])
        command = payload["command"]
    except KeyError as exc:
        raise StudyConfigError(f"Problem document is missing {exc.args[0]!r}") from exc
    except DomainError as exc:
        raise StudyConfigError(f"Invalid space in problem {payload.get('name')!r}: {exc}") from exc

    argv: List[str] = shlex.split(command) if isinstance(command, str) else list(command)
    n_constraints = int(payload.get("n_constraints", 0))
    evaluator = ExternalBlackBox.from_command(
        argv,
        n_constraints=n_constraints,
        timeout_seconds=float(payload.get("timeout_seconds", 60.0)),
        max_retries=int(payload.get("max_retries", 1)),
    )
    reference = payload.get("reference")
    return Problem(
        name=name,
        space=space,
        evaluator=evaluator,
        n_outputs=n_constraints,
        reference_value=None if reference is None else float(reference),
    )


def resolve_problem(value: str) -> Problem:
    """A registered problem name or the path of a JSON/YAML problem file."""
    suite = register_suite()
    key = value.strip().lower().replace(" ", "")
    if key in suite.problems:
        return suite.problems[key]
    path = Path(value).expanduser()
    if path.suffix.lower() in {".json", ".yaml", ".yml"} or path.exists():
        if not path.exists():
            raise StudyConfigError(f"Problem file not found: {path}")
        return problem_from_document(load_document(path))
    return suite.get(value)


_FLAT_RUN_PATTERN = re.compile(
    r"^(?P<problem>.+)__(?P<method>[^_]+)__doe(?P<doe>\d+)__seed(?P<seed>\d+)$"
)


@dataclass(frozen=True)
class RunLogRef:
    """Identity of a per-run CSV recovered from its location."""

    problem: str
    method: MethodSpec
    doe_size: int
    seed: int
    path: Path


def parse_run_path(path: Path) -> Optional[RunLogRef]:
    """Recognize ``<problem>/<method>/doe<n>/seed<k>.csv`` and the flat
    ``<problem>__<method>__doe<n>__seed<k>.csv`` written by ``optimize``."""
    match = _FLAT_RUN_PATTERN.match(path.stem)
    if match:
        problem, method, doe, seed = match.group("problem", "method", "doe", "seed")
    else:
        parts = path.parts
        if len(parts) < 4 or not parts[-2].startswith("doe") or not path.stem.startswith("seed"):
            return None
        problem, method, doe, seed = parts[-4], parts[-3], parts[-2][3:], path.stem[4:]
        if not doe.isdigit() or not seed.isdigit():
            return None
    try:
        spec = parse_method(method)
    except ValueError:
        return None
    return RunLogRef(problem, spec, int(doe), int(seed), path)


def discover_run_logs(root: Path) -> List[RunLogRef]:
    """Every recognizable run CSV below ``root``, in a stable order."""
    found = [parse_run_path(path) for path in sorted(root.rglob("*.csv"))]
    return [item for item in found if item is not None]
