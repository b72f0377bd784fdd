"""Adaptive number of KPLS components by K-fold PRESS and Wold's R."""

from __future__ import annotations

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.model_selection import KFold

from mixed_sego.core.errors import DegenerateDataError, DomainError, IllConditionedError
from mixed_sego.core.gp import GpOptions, KernelConfig, fit_gp, predict_many

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdaptiveConfig:
    """Settings of the component search (see the ``[adaptive]`` config section)."""

    d_min: int = 1
    d_max: int = 5
    threshold: float = 0.95
    folds: int = 4
    seed: int = 0
    fold_starts: int = 2
    fold_evals_per_dim: int = 50
    workers: int = 1

    def __post_init__(self) -> None:
        if self.d_min < 1 or self.d_max < self.d_min:
            raise DomainError(f"need 1 <= d_min <= d_max, got {self.d_min}, {self.d_max}")
        if not 0.0 <= self.threshold <= 1.0:
            raise DomainError(f"threshold {self.threshold} outside [0, 1]")
        if self.folds < 2:
            raise DomainError("at least 2 folds are required")


@dataclass(frozen=True)
class ComponentTrial:
    """One evaluated component count: PRESS(d) and R(d) = PRESS(d+1)/PRESS(d)."""

    d: int
    press: float
    ratio: Optional[float] = None


def fold_indices(n_samples: int, folds: int, seed: int) -> List[np.ndarray]:
    """Random partition of the rows into K folds whose sizes differ by at most one."""
    if not 2 <= folds <= n_samples:
        raise DomainError(f"fold count {folds} must lie in [2, {n_samples}]")
    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    return [test for _, test in splitter.split(np.arange(n_samples))]


def max_components(n_features: int, n_samples: int, folds: int) -> int:
    """Largest d every training fold can support."""
    return min(n_features, n_samples - math.ceil(n_samples / folds) - 1)


def _standardize(y: np.ndarray) -> np.ndarray:
    std = float(np.std(y))
    if std == 0.0:
        raise DegenerateDataError("PRESS undefined for constant outputs")
    return (y - float(np.mean(y))) / std


def _fold_error(
    X: np.ndarray,
    y: np.ndarray,
    held_out: np.ndarray,
    d: int,
    options: GpOptions,
    fold: int,
    seed: int,
) -> float:
    mask = np.ones(X.shape[0], dtype=bool)
    mask[held_out] = False
    try:
        model = fit_gp(X[mask], y[mask], KernelConfig.kpls(d), options=options, seed=seed + fold)
    except (IllConditionedError, DegenerateDataError) as exc:
        raise IllConditionedError(f"fold {fold} fit failed with d={d}: {exc}", fold=fold) from exc
    mean, _ = predict_many(model, X[held_out])
    return float(np.sum((y[held_out] - mean) ** 2))


def press_kfold(
    X: np.ndarray,
    y: np.ndarray,
    d: int,
    folds: int,
    seed: int,
    *,
    options: Optional[GpOptions] = None,
    workers: int = 1,
    assignment: Optional[Sequence[np.ndarray]] = None,
) -> float:
    """K-fold predicted error sum of squares of a d-component KPLS model.

    Inputs are expected in normalized relaxed coordinates; outputs are
    standardized here so PRESS values are scale free.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y_std = _standardize(np.asarray(y, dtype=float).ravel())
    parts = list(assignment) if assignment is not None else fold_indices(X.shape[0], folds, seed)
    fold_options = options or GpOptions(n_starts=2, evals_per_dim=50)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = list(
                pool.map(
                    lambda item: _fold_error(X, y_std, item[1], d, fold_options, item[0], seed),
                    enumerate(parts),
                )
            )
    else:
        errors = [
            _fold_error(X, y_std, held_out, d, fold_options, fold, seed)
            for fold, held_out in enumerate(parts)
        ]
    # Summed in fold order so the result does not depend on scheduling.
    total = 0.0
    for value in errors:
        total += value
    return total


def wold_ratio(press_next: float, press_cur: float) -> float:
    """R(d) = PRESS(d+1) / PRESS(d); a perfect current model gives +inf."""
    if press_cur <= 0.0:
        return math.inf
    return press_next / press_cur


def select_components(
    X: np.ndarray,
    y: np.ndarray,
    cfg: AdaptiveConfig,
) -> Tuple[int, List[ComponentTrial]]:
    """Smallest d whose extra component no longer reduces PRESS below the threshold."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    limit = max_components(X.shape[1], X.shape[0], cfg.folds)
    if limit < 1:
        raise DomainError(
            f"{X.shape[0]} samples cannot support any component with {cfg.folds} folds"
        )
    d_max = min(cfg.d_max, limit)
    if d_max < cfg.d_min:
        raise DomainError(
            f"{X.shape[0]} samples support at most {d_max} components, below d_min={cfg.d_min}"
        )
    d_min = cfg.d_min

    options = GpOptions(n_starts=cfg.fold_starts, evals_per_dim=cfg.fold_evals_per_dim)
    assignment = fold_indices(X.shape[0], cfg.folds, cfg.seed)

    def press(d: int) -> float:
        return press_kfold(
            X, y, d, cfg.folds, cfg.seed,
            options=options, workers=cfg.workers, assignment=assignment,
        )

    d = d_min
    press_cur = press(d)
    trace = [ComponentTrial(d, press_cur)]
    while d < d_max:
        press_next = press(d + 1)
        ratio = wold_ratio(press_next, press_cur)
        trace[-1] = dataclasses.replace(trace[-1], ratio=ratio)
        trace.append(ComponentTrial(d + 1, press_next))
        logger.debug("PRESS(%d)=%.6g PRESS(%d)=%.6g R=%.4f", d, press_cur, d + 1, press_next, ratio)
        if ratio >= cfg.threshold:
            return d, trace
        # Folds are fixed for the whole search, so PRESS(d + 1) is reused as the next PRESS(d).
        logger.debug("Reusing PRESS(%d) with unchanged folds", d + 1)
        d += 1
        press_cur = press_next
    return d, trace
