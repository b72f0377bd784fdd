"""Static constants and labels for mixed-sego."""

from __future__ import annotations

PROBLEM_TITLES = {
    "branin5": "Branin 5",
    "set1": "Set 1",
    "branin3": "Branin 3",
    "branin4": "Branin 4",
}

METHOD_TITLES = {
    "krg": "SEGO+KRG",
    "kpls": "SEGO+KPLS({d})",
    "kpls-auto": "SEGO+KPLS(auto)",
    "ga": "GA",
    "random": "RandomSearch",
}

SURROGATE_METHODS = {"krg", "kpls", "kpls-auto"}
BASELINE_METHODS = {"ga", "random"}

RUN_FILE_TEMPLATE = "{problem}__{method}__doe{doe}__seed{seed}.csv"
CURVE_FILE_TEMPLATE = "{problem}__{method}__doe{doe}.csv"
PROFILE_FILE_TEMPLATE = "profile_tol{tolerance:g}.csv"

EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 1
