"""End-to-end optimization quality on the registered benchmarks (slow)."""

from __future__ import annotations

import statistics
from dataclasses import replace

import pytest

from mixed_sego.core.benchmarks import register_suite
from mixed_sego.core.config import DEFAULT_CONFIG
from mixed_sego.core.statistics import relative_error
from mixed_sego.core.study import execute_method, run_settings
from mixed_sego.utils.parsing import parse_method

SEEDS = range(10)

pytestmark = pytest.mark.slow


def _final_errors(problem_name: str, method: str, settings) -> list:
    problem = register_suite().get(problem_name)
    errors = []
    for seed in SEEDS:
        record = execute_method(problem, parse_method(method), 5, 50, seed, settings)
        best = record.best_feasible
        reference = problem.reference_value
        errors.append(float("inf") if best is None else relative_error(best, reference))
    return errors


def test_integer_branin_converges_and_beats_random_search() -> None:
    settings = run_settings(DEFAULT_CONFIG)
    krg = _final_errors("branin5", "krg", settings)
    random = _final_errors("branin5", "random", settings)
    assert statistics.median(krg) <= 0.05
    assert statistics.median(krg) < statistics.median(random)


def test_constrained_categorical_branin_stays_feasible() -> None:
    settings = run_settings(DEFAULT_CONFIG)
    settings = replace(settings, acquisition=replace(settings.acquisition, generations=50))
    problem = register_suite().get("branin3")
    errors = []
    for seed in SEEDS:
        record = execute_method(problem, parse_method("krg"), 5, 50, seed, settings)
        incumbents = [item for item in record.evaluations if item.incumbent is not None]
        for item in record.evaluations:
            if item.feasible:
                assert item.violation <= 1e-4
        assert incumbents, f"seed {seed} found no feasible point"
        best = record.best_evaluation
        assert best is not None and best.violation <= 1e-4
        errors.append(relative_error(record.best_feasible, problem.reference_value))
    assert statistics.median(errors) <= 0.10
