from __future__ import annotations

import subprocess
import sys

import pytest

from mixed_sego.core.blackbox import ExternalBlackBox
from mixed_sego.core.errors import EvaluationError
from mixed_sego.core.models import MixedPoint

ECHO_SOLVER = """
import json, sys
point = json.loads(sys.stdin.readline())["point"]
x = point["x"][0]
print(json.dumps({"f": x * x + point["c"][0], "g": [0.5 - x]}))
"""


def _solver(script: str, **kwargs) -> ExternalBlackBox:
    return ExternalBlackBox.from_command([sys.executable, "-c", script], **kwargs)


def test_round_trip_through_subprocess() -> None:
    solver = _solver(ECHO_SOLVER, n_constraints=1)
    f, g = solver(MixedPoint.of([2.0], c=[1]))
    assert f == 5.0
    assert g == (-1.5,)


def test_nonzero_exit_reports_last_stderr_line() -> None:
    script = "import sys; sys.stderr.write('warming up\\nmesh failed\\n'); sys.exit(3)"
    with pytest.raises(EvaluationError, match="code 3: mesh failed"):
        _solver(script)(MixedPoint.of([0.0]))


@pytest.mark.parametrize(
    "stdout,match",
    [
        ("", "no response line"),
        ("not json", "malformed"),
        ("[1, 2]", "JSON object"),
        ('{"g": []}', "malformed"),
        ('{"f": 1.0, "g": [1.0, 2.0]}', "2 constraint values, expected 1"),
    ],
)
def test_bad_responses(monkeypatch: pytest.MonkeyPatch, stdout: str, match: str) -> None:
    def fake_run(*args, **kwargs):
        return subprocess.CompletedProcess(args[0], 0, stdout=stdout, stderr="")

    monkeypatch.setattr(subprocess, "run", fake_run)
    solver = ExternalBlackBox.from_command(["solver"], n_constraints=1)
    with pytest.raises(EvaluationError, match=match):
        solver(MixedPoint.of([0.0]))


def test_request_carries_the_mixed_point(monkeypatch: pytest.MonkeyPatch) -> None:
    seen = {}

    def fake_run(command, input, **kwargs):
        seen["command"] = command
        seen["input"] = input
        seen["timeout"] = kwargs["timeout"]
        return subprocess.CompletedProcess(command, 0, stdout='{"f": 2}\n', stderr="")

    monkeypatch.setattr(subprocess, "run", fake_run)
    solver = ExternalBlackBox.from_command(["solver", "--quiet"], timeout_seconds=7.5)
    assert solver(MixedPoint.of([0.25], [3], [1])) == (2.0, ())
    assert seen["command"] == ["solver", "--quiet"]
    assert seen["input"] == '{"point": {"x": [0.25], "z": [3], "c": [1]}}\n'
    assert seen["timeout"] == 7.5


def test_retries_then_succeeds(monkeypatch: pytest.MonkeyPatch) -> None:
    calls = []

    def flaky_run(command, **kwargs):
        calls.append(command)
        if len(calls) == 1:
            raise subprocess.TimeoutExpired(command, 1.0)
        return subprocess.CompletedProcess(command, 0, stdout='{"f": 1}', stderr="")

    monkeypatch.setattr(subprocess, "run", flaky_run)
    solver = ExternalBlackBox(("solver",), max_retries=2, retry_delay=0.0)
    assert solver(MixedPoint.of([0.0])) == (1.0, ())
    assert len(calls) == 2


def test_retries_exhausted(monkeypatch: pytest.MonkeyPatch) -> None:
    def broken_run(command, **kwargs):
        raise FileNotFoundError(command[0])

    monkeypatch.setattr(subprocess, "run", broken_run)
    solver = ExternalBlackBox(("missing-solver",), max_retries=2, retry_delay=0.0)
    with pytest.raises(EvaluationError, match="could not start"):
        solver(MixedPoint.of([0.0]))


def test_empty_command_rejected() -> None:
    with pytest.raises(EvaluationError):
        ExternalBlackBox.from_command([])
