"""Repeated-run harness: executes (problem, method, DoE, seed) runs and aggregates them."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from mixed_sego.core.acquisition import AcquisitionConfig, FeasibilityMode
from mixed_sego.core.baselines import GaConfig, ga_baseline, random_search
from mixed_sego.core.config import (
    DEFAULT_CONFIG,
    ConfigError,
    acquisition_config,
    adaptive_config,
    gp_options,
)
from mixed_sego.core.constants import CURVE_FILE_TEMPLATE, PROFILE_FILE_TEMPLATE
from mixed_sego.core.errors import StudyConfigError
from mixed_sego.core.gp import GpOptions
from mixed_sego.core.kpls_adaptive import AdaptiveConfig
from mixed_sego.core.models import RunRecord
from mixed_sego.core.sego import KernelMode, Problem, SegoConfig, optimize
from mixed_sego.core.statistics import (
    DEFAULT_TOLERANCES,
    boxplot,
    convergence_curve,
    data_profile,
    mean_error,
    relative_error,
)
from mixed_sego.exporters.csv_export import (
    read_run_csv,
    write_curve_csv,
    write_profile_csv,
    write_run_csv,
)
from mixed_sego.exporters.json_export import write_json
from mixed_sego.utils.parsing import (
    MethodSpec,
    load_document,
    parse_feasibility,
    parse_method,
    resolve_problem,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunSettings:
    """Optimizer settings shared by every run of a command or study."""

    gp: GpOptions = field(default_factory=GpOptions)
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    adaptive: AdaptiveConfig = field(default_factory=AdaptiveConfig)
    violation_tol: float = 1e-4
    utb_kappa: float = 3.0
    wall_time: bool = False
    ga: GaConfig = field(default_factory=GaConfig)


def run_settings(config: Dict[str, Any], acquisition: Optional[str] = None) -> RunSettings:
    sego = config.get("sego", {})
    try:
        violation_tol = float(sego.get("violation_tol", 1e-4))
        utb_kappa = float(sego.get("utb_kappa", 3.0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"Invalid [sego] section: {exc}") from exc
    wall_time = bool(config.get("output", {}).get("wall_time", False))
    return RunSettings(
        gp=gp_options(config),
        acquisition=acquisition_config(config, acquisition),
        adaptive=adaptive_config(config),
        violation_tol=violation_tol,
        utb_kappa=utb_kappa,
        wall_time=wall_time,
        ga=GaConfig(violation_tol=violation_tol, record_wall_time=wall_time),
    )


def default_feasibility(problem: Problem, settings: RunSettings) -> FeasibilityMode:
    """UTB for constrained analytical problems, mean prediction for external ones."""
    if problem.constrained and problem.evaluator is None:
        return FeasibilityMode.utb(settings.utb_kappa)
    return FeasibilityMode.mean()


def kernel_mode(method: MethodSpec, adaptive: AdaptiveConfig) -> KernelMode:
    """Surrogate kernel of a method; the baselines map to the full SE kernel."""
    if method.kind == "kpls":
        return KernelMode.kpls_fixed(int(method.n_components or 1))
    if method.kind == "kpls-auto":
        return KernelMode.kpls_auto(adaptive)
    return KernelMode.full_se()


def execute_method(
    problem: Problem,
    method: MethodSpec,
    doe_size: int,
    budget: int,
    seed: int,
    settings: RunSettings,
    feasibility: Optional[FeasibilityMode] = None,
) -> RunRecord:
    """One run; every method gets ``doe_size + budget`` evaluations in total."""
    total = doe_size + budget
    if method.kind == "ga":
        ga = settings.ga
        if ga.population > total:
            ga = replace(ga, population=total)
        return ga_baseline(problem, total - ga.population, seed, ga, method=method.label)
    if method.kind == "random":
        return random_search(
            problem, total, seed,
            doe_size=doe_size, violation_tol=settings.violation_tol, method=method.label,
        )
    cfg = SegoConfig(
        doe_size=doe_size,
        budget=budget,
        kernel=kernel_mode(method, settings.adaptive),
        feasibility=feasibility or default_feasibility(problem, settings),
        violation_tol=settings.violation_tol,
        acquisition=settings.acquisition,
        gp=settings.gp,
        seed=seed,
        record_wall_time=settings.wall_time,
    )
    return optimize(problem, cfg, method=method.label)


@dataclass(frozen=True)
class StudyConfig:
    problems: Tuple[str, ...]
    methods: Tuple[str, ...]
    repetitions: int = 20
    doe_sizes: Tuple[int, ...] = (5,)
    budget: int = 50
    seeds: Tuple[int, ...] = ()
    output_dir: Path = Path("./study-results")
    feasibility: Optional[str] = None
    acquisition: Optional[str] = None
    tolerances: Tuple[float, ...] = DEFAULT_TOLERANCES
    workers: int = 1

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise StudyConfigError("repetitions must be >= 1")
        if not self.problems or not self.methods:
            raise StudyConfigError("a study needs at least one problem and one method")
        if any(size < 2 for size in self.doe_sizes) or not self.doe_sizes:
            raise StudyConfigError("DoE sizes must be >= 2")
        if self.budget < 0:
            raise StudyConfigError("budget must be >= 0")
        if self.seeds and len(self.seeds) != self.repetitions:
            raise StudyConfigError(
                f"{len(self.seeds)} seeds given for {self.repetitions} repetitions"
            )
        for method in self.methods:
            try:
                parse_method(method)
            except ValueError as exc:
                raise StudyConfigError(str(exc)) from exc
        if self.feasibility is not None:
            try:
                parse_feasibility(self.feasibility)
            except ValueError as exc:
                raise StudyConfigError(str(exc)) from exc

    @property
    def run_seeds(self) -> Tuple[int, ...]:
        return self.seeds or tuple(range(self.repetitions))


def _as_tuple(value: Any, name: str) -> Tuple[Any, ...]:
    if value is None:
        return ()
    if isinstance(value, (list, tuple)):
        return tuple(value)
    if isinstance(value, (str, int, float)):
        return (value,)
    raise StudyConfigError(f"'{name}' must be a list")


def study_config_from_document(
    payload: Any,
    config: Dict[str, Any],
    *,
    output_dir: Optional[Path] = None,
    workers: Optional[int] = None,
) -> StudyConfig:
    """Validate a study document (JSON/YAML object) against the loaded configuration."""
    if not isinstance(payload, dict):
        raise StudyConfigError("Study document must be an object")
    study_defaults = config.get("study", {})
    sego_defaults = config.get("sego", {})
    default_dir = study_defaults.get("output_dir", "./study-results")
    try:
        return StudyConfig(
            problems=tuple(str(item) for item in _as_tuple(payload.get("problems"), "problems")),
            methods=tuple(str(item) for item in _as_tuple(payload.get("methods"), "methods")),
            repetitions=int(payload.get("repetitions", study_defaults.get("repetitions", 20))),
            doe_sizes=tuple(
                int(item)
                for item in _as_tuple(
                    payload.get("doe_sizes", payload.get("doe", sego_defaults.get("doe_size", 5))),
                    "doe_sizes",
                )
            ),
            budget=int(payload.get("budget", sego_defaults.get("budget", 50))),
            seeds=tuple(int(item) for item in _as_tuple(payload.get("seeds"), "seeds")),
            output_dir=output_dir or Path(payload.get("output_dir") or default_dir),
            feasibility=payload.get("feasibility"),
            acquisition=payload.get("acquisition"),
            tolerances=tuple(
                float(item)
                for item in _as_tuple(payload.get("tolerances", list(DEFAULT_TOLERANCES)),
                                      "tolerances")
            ),
            workers=int(
                workers if workers is not None
                else payload.get("workers", study_defaults.get("workers", 1))
            ),
        )
    except (TypeError, ValueError) as exc:
        raise StudyConfigError(f"Invalid study document: {exc}") from exc


def load_study_config(path: Path, config: Dict[str, Any], **overrides: Any) -> StudyConfig:
    if not path.exists():
        raise StudyConfigError(f"Study file not found: {path}")
    return study_config_from_document(load_document(path), config, **overrides)


@dataclass(frozen=True)
class RunTask:
    problem: str
    method: MethodSpec
    doe_size: int
    seed: int

    def relative_path(self) -> Path:
        return Path(
            "runs", self.problem, self.method.slug, f"doe{self.doe_size}", f"seed{self.seed}.csv"
        )


@dataclass(frozen=True)
class RunOutcome:
    task: RunTask
    status: str
    path: Optional[Path] = None
    message: Optional[str] = None


def _finite(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def _execute_task(
    task: RunTask,
    problems: Dict[str, Problem],
    cfg: StudyConfig,
    settings: RunSettings,
    root: Path,
) -> RunOutcome:
    problem = problems[task.problem]
    feasibility = (
        parse_feasibility(cfg.feasibility, settings.utb_kappa) if cfg.feasibility else None
    )
    try:
        record = execute_method(
            problem, task.method, task.doe_size, cfg.budget, task.seed, settings, feasibility
        )
        path = write_run_csv(root / task.relative_path(), record, problem.space,
                             wall_time=settings.wall_time)
    except Exception as exc:  # noqa: BLE001 - a failed run must not stop the study
        logger.error("Run %s/%s/doe%d/seed%d failed: %s", task.problem, task.method.label,
                     task.doe_size, task.seed, exc)
        return RunOutcome(task, "failed", message=str(exc))
    logger.info("Run %s/%s/doe%d/seed%d done", task.problem, task.method.label,
                task.doe_size, task.seed)
    return RunOutcome(task, "ok", path=path)


def run_study(
    cfg: StudyConfig,
    config: Optional[Dict[str, Any]] = None,
    *,
    settings: Optional[RunSettings] = None,
) -> Dict[str, Any]:
    """Execute every run in a worker pool, then aggregate the CSVs into study artifacts."""
    settings = settings or run_settings(config or DEFAULT_CONFIG, cfg.acquisition)
    problems: Dict[str, Problem] = {}
    for name in cfg.problems:
        problem = resolve_problem(name)
        problems[problem.name] = problem
    methods = [parse_method(item) for item in cfg.methods]
    root = cfg.output_dir
    tasks = [
        RunTask(name, method, doe_size, seed)
        for name in problems
        for method in methods
        for doe_size in cfg.doe_sizes
        for seed in cfg.run_seeds
    ]
    logger.info("Study: %d runs on %d worker(s) into %s", len(tasks), cfg.workers, root)

    with ThreadPoolExecutor(max_workers=max(cfg.workers, 1)) as pool:
        outcomes = list(
            pool.map(lambda task: _execute_task(task, problems, cfg, settings, root), tasks)
        )
    return aggregate_study(cfg, problems, outcomes, settings.violation_tol)


def aggregate_study(
    cfg: StudyConfig,
    problems: Dict[str, Problem],
    outcomes: Sequence[RunOutcome],
    violation_tol: float = 1e-4,
) -> Dict[str, Any]:
    """Recompute every summary number from the per-run CSVs and write the artifacts."""
    root = cfg.output_dir
    runs: List[Dict[str, Any]] = []
    groups: Dict[Tuple[str, str, int], List[RunRecord]] = {}
    records: List[RunRecord] = []

    for outcome in sorted(outcomes, key=lambda item: (item.task.problem, item.task.method.label,
                                                     item.task.doe_size, item.task.seed)):
        task = outcome.task
        entry: Dict[str, Any] = {
            "problem": task.problem,
            "method": task.method.label,
            "doe": task.doe_size,
            "seed": task.seed,
            "status": outcome.status,
        }
        if outcome.status != "ok" or outcome.path is None:
            entry["message"] = outcome.message
            runs.append(entry)
            continue
        record = read_run_csv(
            outcome.path,
            problem=task.problem,
            method=task.method.label,
            seed=task.seed,
            violation_tol=violation_tol,
        )
        records.append(record)
        groups.setdefault((task.problem, task.method.label, task.doe_size), []).append(record)
        reference = problems[task.problem].reference_value
        best = record.best_feasible
        entry.update(
            {
                "path": str(task.relative_path()),
                "evaluations": len(record.evaluations),
                "best_feasible": _finite(best),
                "error": None
                if best is None or reference is None
                else _finite(relative_error(best, reference)),
            }
        )
        runs.append(entry)

    mean_errors: List[Dict[str, Any]] = []
    boxplots: List[Dict[str, Any]] = []
    curves: Dict[str, str] = {}
    for (problem, method, doe_size), group in sorted(groups.items()):
        reference = problems[problem].reference_value
        bests = [record.best_feasible for record in group]
        errors = [
            None if best is None or reference is None else relative_error(best, reference)
            for best in bests
        ]
        mean_errors.append(
            {
                "problem": problem,
                "method": method,
                "doe": doe_size,
                "mean_error": _finite(mean_error(errors)),
                "n_feasible": sum(1 for best in bests if best is not None),
                "n_runs": len(group),
            }
        )
        feasible_bests = [best for best in bests if best is not None]
        if feasible_bests:
            summary = boxplot(feasible_bests).to_dict()
            summary.update({"problem": problem, "method": method, "doe": doe_size})
            boxplots.append(summary)
        curve_path = Path("curves") / CURVE_FILE_TEMPLATE.format(
            problem=problem, method=method.replace(":", "-"), doe=doe_size
        )
        write_curve_csv(root / curve_path,
                        convergence_curve([record.incumbent_history for record in group]))
        curves[f"{problem}/{method}/doe{doe_size}"] = str(curve_path)

    profiles: Dict[str, str] = {}
    references = {
        name: problem.reference_value
        for name, problem in problems.items()
        if problem.reference_value is not None
    }
    profiled = [record for record in records if record.problem in references]
    skipped = sorted({record.problem for record in records} - set(references))
    if skipped:
        logger.warning("No reference value for %s; left out of data profiles", ", ".join(skipped))
    if profiled:
        for tolerance in cfg.tolerances:
            profile = data_profile(profiled, references, tolerance, violation_tol=violation_tol)
            profile_path = Path("profiles") / PROFILE_FILE_TEMPLATE.format(tolerance=tolerance)
            write_profile_csv(root / profile_path, profile)
            profiles[f"{tolerance:g}"] = str(profile_path)

    summary = {
        "study": {
            "problems": list(cfg.problems),
            "methods": list(cfg.methods),
            "doe_sizes": list(cfg.doe_sizes),
            "budget": cfg.budget,
            "repetitions": cfg.repetitions,
            "seeds": list(cfg.run_seeds),
            "feasibility": cfg.feasibility,
            "acquisition": cfg.acquisition,
            "tolerances": list(cfg.tolerances),
        },
        "references": {name: _finite(value) for name, value in sorted(references.items())},
        "runs": runs,
        "mean_errors": mean_errors,
        "boxplots": boxplots,
        "curves": curves,
        "profiles": profiles,
        "failed": [entry for entry in runs if entry["status"] != "ok"],
    }
    write_json(root / "summary.json", summary)
    return summary
