from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List

import pytest

from mixed_sego.__main__ import app

FAST_CONFIG = """
[gp]
n_starts = 1
evals_per_dim = 30

[adaptive]
fold_starts = 1
fold_evals_per_dim = 20

[sego]
population_factor = 6
generations = 8
local_starts = 1
local_evals = 40
"""


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("MIXED_SEGO_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("MIXED_SEGO_THREADS", raising=False)


@pytest.fixture()
def fast_config(write_temp_toml) -> Path:
    return write_temp_toml("fast.toml", FAST_CONFIG)


def _payload(output: str) -> Dict[str, Any]:
    """The JSON document printed last; log lines may precede it."""
    lines = output.splitlines()
    start = next(index for index, line in enumerate(lines) if line.startswith("{"))
    return json.loads("\n".join(lines[start:]))


def _optimize(runner, fast_config: Path, out: Path, *extra: str, method: str = "krg"):
    args: List[str] = [
        "--config", str(fast_config), "--json", "optimize",
        "--problem", "branin5", "--method", method,
        "--doe", "3", "--budget", "2", "--seed", "1", "--out", str(out), *extra,
    ]
    return runner.invoke(app, args)


def test_list_problems_json(runner) -> None:
    result = runner.invoke(app, ["--json", "list-problems"])
    assert result.exit_code == 0
    payload = _payload(result.stdout)
    rows = {row["name"]: row for row in payload["problems"]}
    assert list(rows) == ["branin5", "set1", "branin3", "branin4"]
    assert rows["branin5"]["relaxed_dim"] == 2
    assert rows["branin4"]["relaxed_dim"] == 14
    assert rows["branin3"]["constraints"] == 1


def test_list_problems_plain(runner) -> None:
    result = runner.invoke(app, ["--plain", "list-problems"])
    assert result.exit_code == 0
    first = result.stdout.splitlines()[0].split("\t")
    assert first[:3] == ["branin5", "2", "0"]


def test_optimize_json_output(runner, fast_config: Path, tmp_path: Path) -> None:
    result = _optimize(runner, fast_config, tmp_path)
    assert result.exit_code == 0, result.stdout
    payload = _payload(result.stdout)
    assert payload["status"] == "ok"
    assert payload["evaluations"] == 5
    assert payload["method"] == "krg"
    assert payload["feasibility"] == "mean"
    assert payload["error"] >= 0
    output = Path(payload["output"])
    assert output == tmp_path / "branin5__krg__doe3__seed1.csv"
    lines = output.read_text().splitlines()
    assert lines[0].startswith("eval_index,iter,x0,z0,f,violation,feasible,incumbent")
    assert len(lines) == 6


def test_optimize_is_byte_identical_across_runs(runner, fast_config: Path,
                                               tmp_path: Path) -> None:
    first = _optimize(runner, fast_config, tmp_path / "a", method="kpls-auto")
    second = _optimize(runner, fast_config, tmp_path / "b", method="kpls-auto")
    assert first.exit_code == 0 and second.exit_code == 0
    name = "branin5__kpls-auto__doe3__seed1.csv"
    assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_optimize_dumps_model(runner, fast_config: Path, tmp_path: Path) -> None:
    model_path = tmp_path / "model.json"
    result = _optimize(runner, fast_config, tmp_path, "--dump-model", str(model_path))
    assert result.exit_code == 0, result.stdout
    assert _payload(result.stdout)["model"] == str(model_path)
    assert model_path.exists()
    assert json.loads(model_path.read_text())


def test_optimize_plain_output(runner, fast_config: Path, tmp_path: Path) -> None:
    result = runner.invoke(
        app,
        ["--config", str(fast_config), "--plain", "optimize", "--problem", "set1",
         "--method", "random", "--doe", "3", "--budget", "4", "--out", str(tmp_path)],
    )
    assert result.exit_code == 0
    fields = dict(line.split("\t", 1) for line in result.stdout.splitlines() if "\t" in line)
    assert fields["method"] == "random"
    assert fields["evaluations"] == "7"
    assert fields["status"] == "ok"


def test_optimize_rich_output(runner, fast_config: Path, tmp_path: Path) -> None:
    result = runner.invoke(
        app,
        ["--config", str(fast_config), "optimize", "--problem", "branin5", "--method", "ga",
         "--doe", "3", "--budget", "2", "--out", str(tmp_path)],
    )
    assert result.exit_code == 0
    assert "Relative error" in result.stdout


@pytest.mark.parametrize(
    "args,message",
    [
        (["--method", "sgd"], "Unsupported method"),
        (["--doe", "1"], "--doe must be >= 2"),
        (["--feasibility", "pof"], "Unsupported feasibility"),
        (["--acquisition", "pi"], "[sego]"),
    ],
)
def test_optimize_invalid_options_exit_2(runner, tmp_path: Path, args: List[str],
                                         message: str) -> None:
    result = runner.invoke(
        app, ["--plain", "optimize", "--problem", "branin5", "--out", str(tmp_path), *args]
    )
    assert result.exit_code == 2
    assert result.stdout.startswith("error\t")
    assert message in result.stdout


def test_optimize_unknown_problem_json_error(runner, tmp_path: Path) -> None:
    result = runner.invoke(app, ["--json", "optimize", "--problem", "rosenbrock",
                                 "--out", str(tmp_path)])
    assert result.exit_code == 2
    payload = _payload(result.stdout)
    assert payload["status"] == "error"
    assert "Unknown problem" in payload["message"]


def _study_file(tmp_path: Path) -> Path:
    path = tmp_path / "study.yaml"
    path.write_text(
        "problems: [branin5]\n"
        "methods: [krg, random]\n"
        "repetitions: 3\n"
        "doe_sizes: [3]\n"
        "budget: 2\n"
        "workers: 2\n"
    )
    return path


def test_study_then_profile(runner, fast_config: Path, tmp_path: Path) -> None:
    out = tmp_path / "results"
    result = runner.invoke(
        app,
        ["--config", str(fast_config), "--json", "study",
         "--config", str(_study_file(tmp_path)), "--out", str(out)],
    )
    assert result.exit_code == 0, result.stdout
    payload = _payload(result.stdout)
    assert payload["status"] == "ok"
    assert payload["runs"] == 6
    assert len(list(out.glob("runs/**/*.csv"))) == 6
    summary = json.loads((out / "summary.json").read_text())
    assert {row["method"] for row in summary["mean_errors"]} == {"krg", "random"}

    profile_path = tmp_path / "profile.csv"
    result = runner.invoke(
        app,
        ["--json", "profile", "--runs", str(out / "runs"), "--tol", "0.5",
         "--out", str(profile_path)],
    )
    assert result.exit_code == 0, result.stdout
    payload = _payload(result.stdout)
    assert payload["runs"] == 6
    assert payload["budgets"] == 5
    assert set(payload["solved"]) == {"krg", "random"}
    assert all(0.0 <= value <= 1.0 for value in payload["solved"].values())
    assert profile_path.read_text().splitlines()[0] == "budget,krg,random"


def test_study_plain_uses_env_output_dir(runner, fast_config: Path, tmp_path: Path,
                                         monkeypatch: pytest.MonkeyPatch) -> None:
    out = tmp_path / "from-env"
    monkeypatch.setenv("MIXED_SEGO_OUTPUT_DIR", str(out))
    study = tmp_path / "study.json"
    study.write_text(json.dumps({"problems": ["set1"], "methods": ["random"],
                                 "repetitions": 2, "doe": 2, "budget": 1}))
    result = runner.invoke(
        app, ["--config", str(fast_config), "--plain", "study", "--config", str(study)]
    )
    assert result.exit_code == 0, result.stdout
    lines = result.stdout.splitlines()
    assert lines[0].split("\t")[:3] == ["set1", "random", "doe2"]
    assert lines[-1] == f"output\t{out.resolve()}"
    assert (out / "summary.json").exists()


def test_study_errors_exit_2(runner, tmp_path: Path) -> None:
    missing = runner.invoke(app, ["--plain", "study", "--config", str(tmp_path / "none.yaml")])
    assert missing.exit_code == 2
    assert "Study file not found" in missing.stdout

    bad = tmp_path / "bad.yaml"
    bad.write_text("problems: [branin5]\nmethods: [sgd]\n")
    invalid = runner.invoke(app, ["--plain", "study", "--config", str(bad)])
    assert invalid.exit_code == 2
    assert "Unsupported method" in invalid.stdout


def test_profile_errors_exit_2(runner, tmp_path: Path) -> None:
    missing = runner.invoke(app, ["--plain", "profile", "--runs", str(tmp_path / "none"),
                                  "--out", str(tmp_path / "p.csv")])
    assert missing.exit_code == 2
    assert "Run directory not found" in missing.stdout

    empty = runner.invoke(app, ["--plain", "profile", "--runs", str(tmp_path),
                                "--out", str(tmp_path / "p.csv")])
    assert empty.exit_code == 2
    assert "No run logs found" in empty.stdout


def test_profile_needs_reference_for_external_problems(runner, tmp_path: Path) -> None:
    runs = tmp_path / "runs"
    runs.mkdir()
    log = runs / "beam__krg__doe2__seed0.csv"
    log.write_text(
        "eval_index,iter,x0,f,violation,feasible,incumbent,d_f,acq_value,wall_ms\n"
        "0,0,0.5,3,0,1,3,,,\n"
        "1,0,0.25,2,0,1,2,,,\n"
    )
    result = runner.invoke(app, ["--plain", "profile", "--runs", str(runs),
                                 "--out", str(tmp_path / "p.csv")])
    assert result.exit_code == 2
    assert "No reference value" in result.stdout

    result = runner.invoke(app, ["--plain", "profile", "--runs", str(runs), "--tol", "0",
                                 "--reference", "beam=2", "--out", str(tmp_path / "p.csv")])
    assert result.exit_code == 0, result.stdout
    assert result.stdout.splitlines()[0] == "krg\t1"
