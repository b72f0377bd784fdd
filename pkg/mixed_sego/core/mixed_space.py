"""Mixed design spaces, continuous relaxation, projection and LHS designs.

A relaxed vector has the fixed layout::

    [continuous block (n) | integer block (m) | categorical blocks (L_1 + ... + L_l)]

Integer coordinates live between the smallest and largest level of their
level set; each categorical variable owns L_j coordinates in [0, 1].
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from mixed_sego.core.errors import DomainError
from mixed_sego.core.models import MixedPoint


@dataclass(frozen=True)
class MixedSpace:
    """Design domain made of continuous, integer and categorical variables."""

    continuous: Tuple[Tuple[float, float], ...] = ()
    integers: Tuple[Tuple[int, ...], ...] = ()
    categoricals: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for index, (lower, upper) in enumerate(self.continuous):
            if not lower < upper:
                raise DomainError(
                    f"continuous variable {index}: lower bound {lower} must be < upper {upper}"
                )
        for index, levels in enumerate(self.integers):
            if not levels:
                raise DomainError(f"integer variable {index} has an empty level set")
            if list(levels) != sorted(set(levels)):
                raise DomainError(
                    f"integer variable {index}: levels must be sorted ascending and unique"
                )
        for index, count in enumerate(self.categoricals):
            if count < 2:
                raise DomainError(f"categorical variable {index} needs at least 2 levels")

    @classmethod
    def build(
        cls,
        continuous: Sequence[Sequence[float]] = (),
        integers: Sequence[Sequence[int]] = (),
        categoricals: Sequence[int] = (),
    ) -> "MixedSpace":
        return cls(
            continuous=tuple((float(lo), float(hi)) for lo, hi in continuous),
            integers=tuple(tuple(int(level) for level in levels) for levels in integers),
            categoricals=tuple(int(count) for count in categoricals),
        )

    @property
    def n(self) -> int:
        return len(self.continuous)

    @property
    def m(self) -> int:
        return len(self.integers)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.categoricals)

    @property
    def is_continuous(self) -> bool:
        return self.m == 0 and self.l == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "continuous": [[lo, hi] for lo, hi in self.continuous],
            "integers": [list(levels) for levels in self.integers],
            "categoricals": list(self.categoricals),
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "MixedSpace":
        if not isinstance(payload, dict):
            raise DomainError("space document must be an object")
        try:
            return cls.build(
                continuous=payload.get("continuous", []),
                integers=payload.get("integers", []),
                categoricals=payload.get("categoricals", []),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed space document: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MixedSpace":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: Path) -> "MixedSpace":
        return cls.from_json(path.read_text())


def relaxed_dim(space: MixedSpace) -> int:
    """Return n' = n + m + sum(L_j)."""
    return space.n + space.m + sum(space.categoricals)


def categorical_slices(space: MixedSpace) -> List[slice]:
    """Slices of the one-hot blocks inside a relaxed vector."""
    start = space.n + space.m
    blocks: List[slice] = []
    for count in space.categoricals:
        blocks.append(slice(start, start + count))
        start += count
    return blocks


def relaxed_bounds(space: MixedSpace) -> Tuple[np.ndarray, np.ndarray]:
    """Lower and upper corners of the relaxed box Omega'."""
    lower: List[float] = [lo for lo, _ in space.continuous]
    upper: List[float] = [hi for _, hi in space.continuous]
    for levels in space.integers:
        lower.append(float(levels[0]))
        upper.append(float(levels[-1]))
    for count in space.categoricals:
        lower.extend([0.0] * count)
        upper.extend([1.0] * count)
    return np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)


def contains(space: MixedSpace, w: MixedPoint) -> bool:
    """Whether every coordinate of w lies in its variable's range."""
    if len(w.x) != space.n or len(w.z) != space.m or len(w.c) != space.l:
        return False
    for value, (lower, upper) in zip(w.x, space.continuous):
        if not lower <= value <= upper:
            return False
    for value, levels in zip(w.z, space.integers):
        if value not in levels:
            return False
    for value, count in zip(w.c, space.categoricals):
        if not 0 <= value < count:
            return False
    return True


def relax(w: MixedPoint, space: MixedSpace) -> np.ndarray:
    """Embed a mixed point into the relaxed space (one-hot categoricals)."""
    if not contains(space, w):
        raise DomainError(f"point {w.to_dict()} does not belong to the space")
    vector = np.zeros(relaxed_dim(space), dtype=float)
    vector[: space.n] = w.x
    vector[space.n : space.n + space.m] = w.z
    for block, level in zip(categorical_slices(space), w.c):
        vector[block.start + level] = 1.0
    return vector


def relax_many(points: Sequence[MixedPoint], space: MixedSpace) -> np.ndarray:
    if not points:
        return np.zeros((0, relaxed_dim(space)), dtype=float)
    return np.vstack([relax(point, space) for point in points])


def _nearest_level(value: float, levels: Tuple[int, ...]) -> int:
    position = int(np.searchsorted(levels, value))
    if position <= 0:
        return levels[0]
    if position >= len(levels):
        return levels[-1]
    below, above = levels[position - 1], levels[position]
    # Midpoint ties go to the lower level.
    return below if value - below <= above - value else above


def project(vector: Sequence[float], space: MixedSpace) -> MixedPoint:
    """Map a relaxed vector back to the mixed space.

    Continuous coordinates are clipped, integers rounded to the nearest level
    and each categorical block resolved by argmax (lowest index on ties).
    """
    values = np.asarray(vector, dtype=float)
    if values.ndim != 1 or values.shape[0] != relaxed_dim(space):
        raise DomainError(
            f"relaxed vector has length {values.shape[-1] if values.ndim else 0}, "
            f"expected {relaxed_dim(space)}"
        )
    x = [
        float(min(max(values[index], lower), upper))
        for index, (lower, upper) in enumerate(space.continuous)
    ]
    z = [
        _nearest_level(float(values[space.n + index]), levels)
        for index, levels in enumerate(space.integers)
    ]
    c = [int(np.argmax(values[block])) for block in categorical_slices(space)]
    return MixedPoint.of(x, z, c)


def project_many(vectors: np.ndarray, space: MixedSpace) -> List[MixedPoint]:
    return [project(row, space) for row in np.atleast_2d(vectors)]


def centered_lhs(dimension: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Centered Latin hypercube on the unit cube: every point sits in the middle of its stratum."""
    if count < 1:
        raise DomainError("sample count must be >= 1")
    return qmc.LatinHypercube(d=dimension, scramble=False, seed=rng).random(count)


def lhs_sample(space: MixedSpace, count: int, seed: int) -> List[MixedPoint]:
    """Latin hypercube sample drawn in Omega' and projected to the mixed space."""
    rng = np.random.default_rng(seed)
    lower, upper = relaxed_bounds(space)
    unit = centered_lhs(relaxed_dim(space), count, rng)
    return project_many(lower + unit * (upper - lower), space)


def enumerate_discrete(space: MixedSpace) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Iterate over every (integer levels, categorical levels) combination."""
    grids: List[Sequence[int]] = [levels for levels in space.integers]
    grids.extend(range(count) for count in space.categoricals)
    if not grids:
        yield (), ()
        return
    for combo in np.ndindex(*[len(grid) for grid in grids]):
        values = [int(grid[position]) for grid, position in zip(grids, combo)]
        yield tuple(values[: space.m]), tuple(values[space.m :])
