"""Formatting helpers used by exports and console output."""

from __future__ import annotations

import math
from typing import Optional

from mixed_sego.core.constants import METHOD_TITLES, PROBLEM_TITLES
from mixed_sego.core.mixed_space import MixedSpace, relaxed_dim


def format_value(value: Optional[float], digits: int = 6) -> str:
    """Short human form of a number; N/A for missing values."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "N/A"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}g}"


def format_percent(value: Optional[float]) -> str:
    if value is None:
        return "N/A"
    return f"{100.0 * value:.2f}%"


def format_space(space: MixedSpace) -> str:
    """E.g. ``n=1 m=1[16] l=0 -> n'=2``."""
    levels = ",".join(str(len(item)) for item in space.integers)
    categories = ",".join(str(count) for count in space.categoricals)
    integer_part = f"m={space.m}" + (f"[{levels}]" if levels else "")
    categorical_part = f"l={space.l}" + (f"[{categories}]" if categories else "")
    return f"n={space.n} {integer_part} {categorical_part} -> n'={relaxed_dim(space)}"


def problem_title(name: str) -> str:
    return PROBLEM_TITLES.get(name, name)


def method_title(label: str) -> str:
    if label.startswith("kpls:"):
        return METHOD_TITLES["kpls"].format(d=label.split(":", 1)[1])
    return METHOD_TITLES.get(label, label)
