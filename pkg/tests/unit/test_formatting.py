from __future__ import annotations

import math

from mixed_sego.core.benchmarks import branin4_space, branin5_space
from mixed_sego.utils.formatting import (
    format_percent,
    format_space,
    format_value,
    method_title,
    problem_title,
)


def test_format_value() -> None:
    assert format_value(None) == "N/A"
    assert format_value(math.nan) == "N/A"
    assert format_value(math.inf) == "inf"
    assert format_value(0.397887357729739) == "0.397887"
    assert format_value(2.5, digits=2) == "2.5"


def test_format_percent() -> None:
    assert format_percent(None) == "N/A"
    assert format_percent(0.0123) == "1.23%"


def test_format_space() -> None:
    assert format_space(branin5_space()) == "n=1 m=1[16] l=0 -> n'=2"
    assert format_space(branin4_space()) == "n=10 m=0 l=2[2,2] -> n'=14"


def test_titles() -> None:
    assert method_title("kpls:3") == "SEGO+KPLS(3)"
    assert method_title("kpls-auto") == "SEGO+KPLS(auto)"
    assert method_title("cmaes") == "cmaes"
    assert problem_title("branin5") == "Branin 5"
    assert problem_title("beam") == "beam"
