"""Analytical benchmark problems and the oracles that fix their reference optima.

Registered problems (all minimized):

``branin5``
    Integer z in {-5, ..., 10} and continuous x in [0, 10];
    f = branin(z, 1.5 x).
``set1``
    One categorical choice among ten 1-D functions of x in [0, 1];
    f_k(x) = a_k cos(omega_k pi x + phi_k) + b_k (x - x0_k)^2 + c_k.
``branin3``
    Two binary categoricals (c1, c2) and x1, x2 in [0, 1]. With u = 15 x1 - 5
    and v = 15 x2 each level pair selects a sign s, shift delta and offset o:
    f = (v - b u^2 + c u - 6)^2 + 10 (1 - t) s cos(u + delta) + 10 + o,
    subject to g = 0.2 - x1 x2 <= 0.
``branin4``
    ``branin3`` on x1, x2 plus 0.5 * sum_{i=3..10} (x_i - 0.5)^2, same constraint.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import optimize

from mixed_sego.core.errors import StudyConfigError
from mixed_sego.core.mixed_space import MixedSpace, enumerate_discrete
from mixed_sego.core.models import MixedPoint
from mixed_sego.core.sego import Problem

logger = logging.getLogger(__name__)

Number = Union[float, np.ndarray]

_B = 5.1 / (4.0 * math.pi**2)
_C = 5.0 / math.pi
_T = 1.0 / (8.0 * math.pi)

# (a, omega, phi, b, x0, c) for each level of set1.
SET1_TABLE: Tuple[Tuple[float, float, float, float, float, float], ...] = (
    (1.0, 2.0, 0.0, 1.0, 0.5, 0.0),
    (0.8, 3.0, 0.5, 2.0, 0.3, 0.2),
    (1.2, 1.0, 1.0, 0.5, 0.7, 0.1),
    (0.5, 4.0, 0.0, 3.0, 0.2, -0.3),
    (1.5, 2.0, 2.0, 1.0, 0.8, 0.4),
    (0.7, 5.0, 1.5, 0.8, 0.6, -0.1),
    (1.0, 6.0, 0.3, 2.5, 0.4, 0.3),
    (0.9, 1.5, 2.5, 1.5, 0.1, -0.2),
    (1.3, 3.5, 0.8, 0.3, 0.9, 0.0),
    (0.6, 2.5, 1.2, 4.0, 0.5, -0.4),
)

# (sign, shift, offset) of the cosine term per (c1, c2).
BRANIN3_VARIANTS: Dict[Tuple[int, int], Tuple[float, float, float]] = {
    (0, 0): (1.0, 0.0, 0.0),
    (0, 1): (1.0, 1.0, 2.0),
    (1, 0): (-1.0, 0.0, 15.0),
    (1, 1): (1.0, -1.0, 5.0),
}

BRANIN4_EXTRA = 8


def branin(x1: Number, x2: Number) -> Number:
    """Standard Branin function; global minimum 0.397887 at (-pi, 12.275) and (pi, 2.275)."""
    return (x2 - _B * x1**2 + _C * x1 - 6.0) ** 2 + 10.0 * (1.0 - _T) * np.cos(x1) + 10.0


def branin5_value(z: Number, x: Number) -> Number:
    return branin(z, 1.5 * x)


def set1_value(level: int, x: Number) -> Number:
    a, omega, phi, b, x0, c = SET1_TABLE[level]
    return a * np.cos(omega * math.pi * x + phi) + b * (x - x0) ** 2 + c


def branin3_value(levels: Tuple[int, int], x1: Number, x2: Number) -> Number:
    sign, shift, offset = BRANIN3_VARIANTS[(int(levels[0]), int(levels[1]))]
    u = 15.0 * x1 - 5.0
    v = 15.0 * x2
    quadratic = (v - _B * u**2 + _C * u - 6.0) ** 2
    return quadratic + 10.0 * (1.0 - _T) * sign * np.cos(u + shift) + 10.0 + offset


def branin3_constraint(x1: Number, x2: Number) -> Number:
    return 0.2 - x1 * x2


def _branin4_extra(x: np.ndarray) -> float:
    return 0.5 * float(np.sum((np.asarray(x) - 0.5) ** 2))


@dataclass(frozen=True)
class ReferenceOptimum:
    """Best value found by the registered oracle and the settings it used."""

    value: float
    point: MixedPoint
    oracle: str
    settings: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class BenchmarkSuite:
    problems: Dict[str, Problem]
    references: Dict[str, ReferenceOptimum]

    def names(self) -> List[str]:
        return list(self.problems)

    def get(self, name: str) -> Problem:
        key = name.strip().lower().replace(" ", "")
        if key not in self.problems:
            known = ", ".join(self.problems)
            raise StudyConfigError(f"Unknown problem {name!r}. Known problems: {known}")
        return self.problems[key]


def _refine_scalar(
    func: Any, center: float, step: float, lower: float, upper: float
) -> Tuple[float, float]:
    lo = max(lower, center - step)
    hi = min(upper, center + step)
    result = optimize.minimize_scalar(
        func, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
    )
    if float(result.fun) < float(func(center)):
        return float(result.x), float(result.fun)
    return center, float(func(center))


def _scalar_oracle(
    space: MixedSpace,
    value: Any,
    grid_size: int,
) -> Tuple[float, MixedPoint]:
    lower, upper = space.continuous[0]
    grid = np.linspace(lower, upper, grid_size)
    step = (upper - lower) / (grid_size - 1)
    best: Optional[Tuple[float, MixedPoint]] = None
    for z, c in enumerate_discrete(space):
        values = value(z, c, grid)
        index = int(np.argmin(values))
        x, f = _refine_scalar(lambda t: float(value(z, c, t)), float(grid[index]), step,
                              lower, upper)
        if best is None or f < best[0]:
            best = (f, MixedPoint.of([x], z, c))
    assert best is not None
    return best


def _branin5_oracle() -> ReferenceOptimum:
    space = branin5_space()
    grid_size = 10001
    value, point = _scalar_oracle(space, lambda z, c, x: branin5_value(z[0], x), grid_size)
    return ReferenceOptimum(value, point, "enumeration+grid", {"grid": grid_size})


def _set1_oracle() -> ReferenceOptimum:
    space = set1_space()
    grid_size = 10001
    value, point = _scalar_oracle(space, lambda z, c, x: set1_value(c[0], x), grid_size)
    return ReferenceOptimum(value, point, "enumeration+grid", {"grid": grid_size})


def _slsqp(
    objective: Any,
    x0: np.ndarray,
    bounds: List[Tuple[float, float]],
) -> Optional[Tuple[float, np.ndarray]]:
    result = optimize.minimize(
        objective,
        x0,
        method="SLSQP",
        bounds=bounds,
        constraints=[{"type": "ineq", "fun": lambda x: -float(branin3_constraint(x[0], x[1]))}],
        options={"ftol": 1e-14, "maxiter": 500},
    )
    x = np.clip(result.x, [lo for lo, _ in bounds], [hi for _, hi in bounds])
    if float(branin3_constraint(x[0], x[1])) > 1e-10:
        return None
    return float(objective(x)), x


def _branin3_oracle() -> ReferenceOptimum:
    grid_size = 801
    axis = np.linspace(0.0, 1.0, grid_size)
    X1, X2 = np.meshgrid(axis, axis, indexing="ij")
    feasible = branin3_constraint(X1, X2) <= 0
    best: Optional[Tuple[float, MixedPoint]] = None
    for _, c in enumerate_discrete(branin3_space()):
        values = np.where(feasible, branin3_value(c, X1, X2), np.inf)
        flat = np.argsort(values, axis=None)[:5]
        for index in flat:
            i, j = np.unravel_index(index, values.shape)
            start = np.array([axis[i], axis[j]])
            candidates = [(float(values[i, j]), start)]
            refined = _slsqp(lambda x: float(branin3_value(c, x[0], x[1])), start,
                             [(0.0, 1.0), (0.0, 1.0)])
            if refined is not None:
                candidates.append(refined)
            f, x = min(candidates, key=lambda item: item[0])
            if best is None or f < best[0]:
                best = (f, MixedPoint.of(x, (), c))
    assert best is not None
    return ReferenceOptimum(best[0], best[1], "enumeration+grid+slsqp",
                            {"grid": grid_size, "starts_per_level": 5})


def _branin4_oracle(starts: int = 20, seed: int = 0) -> ReferenceOptimum:
    base = reference_optimum("branin3")
    rng = np.random.default_rng(seed)
    bounds = [(0.0, 1.0)] * (2 + BRANIN4_EXTRA)
    best: Optional[Tuple[float, MixedPoint]] = None
    for _, c in enumerate_discrete(branin4_space()):
        def objective(x: np.ndarray, c: Tuple[int, ...] = c) -> float:
            return float(branin3_value(c, x[0], x[1])) + _branin4_extra(x[2:])

        initial = [np.concatenate([base.point.x, np.full(BRANIN4_EXTRA, 0.5)])]
        initial.extend(rng.random((starts, 2 + BRANIN4_EXTRA)))
        for x0 in initial:
            refined = _slsqp(objective, np.asarray(x0, dtype=float), bounds)
            if refined is None:
                continue
            f, x = refined
            if best is None or f < best[0]:
                best = (f, MixedPoint.of(x, (), c))
    assert best is not None
    return ReferenceOptimum(best[0], best[1], "multistart-slsqp",
                            {"starts_per_level": starts + 1, "seed": seed})


def branin5_space() -> MixedSpace:
    return MixedSpace.build(continuous=[(0.0, 10.0)], integers=[list(range(-5, 11))])


def set1_space() -> MixedSpace:
    return MixedSpace.build(continuous=[(0.0, 1.0)], categoricals=[len(SET1_TABLE)])


def branin3_space() -> MixedSpace:
    return MixedSpace.build(continuous=[(0.0, 1.0)] * 2, categoricals=[2, 2])


def branin4_space() -> MixedSpace:
    return MixedSpace.build(continuous=[(0.0, 1.0)] * (2 + BRANIN4_EXTRA), categoricals=[2, 2])


_ORACLES = {
    "branin5": _branin5_oracle,
    "set1": _set1_oracle,
    "branin3": _branin3_oracle,
    "branin4": _branin4_oracle,
}


@functools.lru_cache(maxsize=None)
def reference_optimum(name: str) -> ReferenceOptimum:
    """Run the registered oracle for ``name`` once per process."""
    reference = _ORACLES[name]()
    logger.debug("Reference optimum of %s: %.10g at %s", name, reference.value,
                 reference.point.to_dict())
    return reference


def _problems() -> Dict[str, Problem]:
    return {
        "branin5": Problem(
            name="branin5",
            space=branin5_space(),
            objective=lambda w: float(branin5_value(w.z[0], w.x[0])),
        ),
        "set1": Problem(
            name="set1",
            space=set1_space(),
            objective=lambda w: float(set1_value(w.c[0], w.x[0])),
        ),
        "branin3": Problem(
            name="branin3",
            space=branin3_space(),
            objective=lambda w: float(branin3_value(w.c, w.x[0], w.x[1])),
            constraints=(lambda w: float(branin3_constraint(w.x[0], w.x[1])),),
        ),
        "branin4": Problem(
            name="branin4",
            space=branin4_space(),
            objective=lambda w: float(branin3_value(w.c, w.x[0], w.x[1]))
            + _branin4_extra(np.asarray(w.x[2:])),
            constraints=(lambda w: float(branin3_constraint(w.x[0], w.x[1])),),
        ),
    }


@functools.lru_cache(maxsize=None)
def register_suite() -> BenchmarkSuite:
    """The four analytical problems with oracle reference optima attached."""
    problems: Dict[str, Problem] = {}
    references: Dict[str, ReferenceOptimum] = {}
    for name, problem in _problems().items():
        reference = reference_optimum(name)
        references[name] = reference
        problems[name] = replace(
            problem, reference_value=reference.value, reference_point=reference.point
        )
    return BenchmarkSuite(problems=problems, references=references)


def sphere_problem(dimension: int = 2, bound: float = 5.0) -> Problem:
    """Unconstrained sum of squares on [-bound, bound]^dimension, optimum 0 at the origin."""
    return Problem(
        name=f"sphere{dimension}",
        space=MixedSpace.build(continuous=[(-bound, bound)] * dimension),
        objective=lambda w: float(sum(value * value for value in w.x)),
        reference_value=0.0,
        reference_point=MixedPoint.of([0.0] * dimension),
    )
