"""Configuration loading and resolution of runtime settings."""

from __future__ import annotations

import copy
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

try:  # Python 3.11+
    import tomllib  # type: ignore[attr-defined]
except ModuleNotFoundError:  # Python 3.9-3.10
    import tomli as tomllib  # type: ignore[no-redef]

from mixed_sego.core.acquisition import AcquisitionConfig, AcquisitionKind
from mixed_sego.core.errors import MixedSegoError
from mixed_sego.core.gp import GpOptions
from mixed_sego.core.kpls_adaptive import AdaptiveConfig


class ConfigError(MixedSegoError):
    """Raised when config file parsing fails."""


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def expand_path(path_str: str) -> Path:
    """Expand user/env vars and return absolute path."""
    return Path(os.path.expandvars(path_str)).expanduser().resolve()


def default_config_path() -> Path:
    """Get default config file path."""
    raw = os.getenv("MIXED_SEGO_CONFIG_FILE", "~/.config/mixed-sego/config.toml")
    return expand_path(raw)


def _default_config() -> Dict[str, Any]:
    return {
        "gp": {
            "log10_theta_bounds": [-6.0, 2.0],
            "n_starts": 5,
            "evals_per_dim": 200,
            "nugget_bounds": [1e-12, 1e-2],
            "jitter": 1e-10,
            "max_jitter": 1e-6,
        },
        "adaptive": {
            "d_min": 1,
            "d_max": 5,
            "threshold": 0.95,
            "folds": 4,
            "fold_starts": 2,
            "fold_evals_per_dim": 50,
        },
        "sego": {
            "doe_size": 5,
            "budget": 50,
            "violation_tol": 1e-4,
            "utb_kappa": 3.0,
            "acquisition": "wb2s",
            "wb2s_beta": 100.0,
            "population_factor": 50,
            "generations": 100,
            "local_starts": 3,
            "local_evals": 500,
        },
        "study": {
            "repetitions": 20,
            "workers": 0,
            "output_dir": "./study-results",
        },
        "output": {
            "wall_time": False,
        },
    }


DEFAULT_CONFIG: Dict[str, Any] = _default_config()


def _read_config(path: Path) -> Dict[str, Any]:
    suffix = path.suffix.lower()
    text = path.read_text()
    try:
        if suffix in {".toml", ""}:
            loaded = tomllib.loads(text)
        else:
            loaded = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Invalid JSON in config file {path}: {exc}") from exc
    except Exception as exc:
        if suffix in {".toml", ""}:
            raise ConfigError(f"Invalid TOML in config file {path}: {exc}") from exc
        raise ConfigError(f"Failed to parse config file {path}: {exc}") from exc

    if not isinstance(loaded, dict):
        raise ConfigError(f"Config file {path} must contain an object/table at the root")
    return loaded


def load_config(path: Optional[Path] = None) -> Dict[str, Any]:
    """Load configuration from disk, merged with defaults."""
    cfg_path = path or default_config_path()
    cfg = _default_config()
    if cfg_path.exists():
        cfg = _deep_merge(cfg, _read_config(cfg_path))
    return cfg


def _section(config: Dict[str, Any], name: str) -> Dict[str, Any]:
    section = config.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"Config section [{name}] must be a table")
    return section


def gp_options(config: Dict[str, Any]) -> GpOptions:
    section = _section(config, "gp")
    try:
        theta_lo, theta_hi = (float(value) for value in section["log10_theta_bounds"])
        nugget_lo, nugget_hi = (float(value) for value in section["nugget_bounds"])
        options = GpOptions(
            log10_theta_bounds=(theta_lo, theta_hi),
            n_starts=int(section["n_starts"]),
            evals_per_dim=int(section["evals_per_dim"]),
            nugget_bounds=(nugget_lo, nugget_hi),
            jitter=float(section["jitter"]),
            max_jitter=float(section["max_jitter"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"Invalid [gp] section: {exc}") from exc
    if not theta_lo < theta_hi or not 0 < nugget_lo < nugget_hi or options.n_starts < 1:
        raise ConfigError("Invalid [gp] section: bounds must be increasing and n_starts >= 1")
    return options


def adaptive_config(config: Dict[str, Any], seed: int = 0) -> AdaptiveConfig:
    section = _section(config, "adaptive")
    try:
        return AdaptiveConfig(
            d_min=int(section["d_min"]),
            d_max=int(section["d_max"]),
            threshold=float(section["threshold"]),
            folds=int(section["folds"]),
            seed=seed,
            fold_starts=int(section["fold_starts"]),
            fold_evals_per_dim=int(section["fold_evals_per_dim"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"Invalid [adaptive] section: {exc}") from exc


def acquisition_config(config: Dict[str, Any], kind: Optional[str] = None) -> AcquisitionConfig:
    section = _section(config, "sego")
    try:
        return AcquisitionConfig(
            kind=AcquisitionKind((kind or section["acquisition"]).lower()),
            beta=float(section["wb2s_beta"]),
            population_factor=int(section["population_factor"]),
            generations=int(section["generations"]),
            local_starts=int(section["local_starts"]),
            local_evals=int(section["local_evals"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        # DomainError is a ValueError too.
        raise ConfigError(f"Invalid [sego] section: {exc}") from exc


def resolve_output_dir(config: Dict[str, Any], explicit: Optional[Path] = None) -> Path:
    """Resolve output directory with CLI override first."""
    if explicit is not None:
        return explicit.expanduser().resolve()
    raw = os.getenv("MIXED_SEGO_OUTPUT_DIR") or config.get("study", {}).get(
        "output_dir",
        "./study-results",
    )
    return expand_path(raw)


def resolve_workers(config: Dict[str, Any], explicit: Optional[int] = None) -> int:
    """Worker-pool width: CLI flag, else config (0 = CPU count), capped by MIXED_SEGO_THREADS."""
    workers = explicit if explicit is not None else int(config.get("study", {}).get("workers", 0))
    if workers <= 0:
        workers = os.cpu_count() or 1
    cap = os.getenv("MIXED_SEGO_THREADS")
    if cap:
        try:
            limit = int(cap)
        except ValueError as exc:
            raise ConfigError(f"MIXED_SEGO_THREADS must be an integer, got {cap!r}") from exc
        if limit >= 1:
            workers = min(workers, limit)
    return workers
