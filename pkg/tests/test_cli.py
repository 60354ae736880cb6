"""Tests for the hyperdyn command line"""
import json
import logging

import pandas as pd
import pytest
from click.testing import CliRunner

from hyperdyn.cli import main

SHIFT3 = json.dumps({"kind": "full_shift", "length": 3, "depth": 1})


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("HYPERDYN_BUDGET", "HYPERDYN_LOG_LEVEL", "HYPERDYN_LOG_FILE", "HYPERDYN_WORKERS"):
        monkeypatch.delenv(name, raising=False)
    yield
    logging.getLogger().handlers = []


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def system_file(tmp_path, two_point_description):
    path = tmp_path / "two_point.json"
    path.write_text(json.dumps(two_point_description))
    return path


def _report(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_validate_recipe(runner):
    result = runner.invoke(main, ["validate", "--recipe", SHIFT3])
    assert result.exit_code == 0
    assert "Valid" in result.output


def test_validate_system_file(runner, system_file):
    result = runner.invoke(main, ["validate", "--system", str(system_file)])
    assert result.exit_code == 0


def test_validate_rejects_bad_system(runner, tmp_path, two_point_description):
    two_point_description["maps"] = [["a", "q"]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(two_point_description))
    result = runner.invoke(main, ["validate", "--system", str(path)])
    assert result.exit_code == 1


def test_validate_wants_exactly_one_source(runner, system_file):
    result = runner.invoke(main, ["validate", "--system", str(system_file), "--recipe", SHIFT3])
    assert result.exit_code == 1


def test_check_from_command_line(runner, tmp_path):
    report = tmp_path / "out" / "report.jsonl"
    result = runner.invoke(main, ["check", "sensitive", "transitive", "--recipe", SHIFT3,
                                  "--delta", "1/2", "--output", str(report)])
    assert result.exit_code == 0
    records = _report(report)
    assert [r["property"] for r in records] == ["sensitive", "transitive"]
    assert records[0]["status"] == "Holds"
    assert records[0]["params"] == {"delta": "1/2"}


def test_check_rejects_decimal_delta(runner, tmp_path):
    result = runner.invoke(main, ["check", "sensitive", "--recipe", SHIFT3, "--delta", "0.5",
                                  "--output", str(tmp_path / "r.jsonl")])
    assert result.exit_code == 1


def test_check_unknown_property(runner):
    result = runner.invoke(main, ["check", "chaotic", "--recipe", SHIFT3])
    assert result.exit_code == 1


def test_check_budget_from_environment(runner, tmp_path):
    report = tmp_path / "report.jsonl"
    result = runner.invoke(
        main,
        ["check", "transitive", "--recipe", SHIFT3, "--target", "lifted:2", "--output", str(report)],
        env={"HYPERDYN_BUDGET": "max_hyperspace_points=1"},
    )
    assert result.exit_code == 0
    records = _report(report)
    assert records[0]["record_type"] == "resource_error"
    assert records[0]["limit"] == 1


def test_check_with_config_file(runner, tmp_path, two_point_description):
    report = tmp_path / "report.jsonl"
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({
        "system": {"description": two_point_description},
        "queries": [{"property": "dense_periodic"}],
        "output": {"path": str(report)},
    }))
    result = runner.invoke(main, ["check", "--config", str(config)])
    assert result.exit_code == 0
    assert _report(report)[0]["status"] == "Holds"


def test_check_log_base_reaches_entropy_queries(runner, tmp_path):
    report = tmp_path / "entropy.jsonl"
    result = runner.invoke(main, ["check", "entropy", "separated_entropy", "sensitive", "--recipe", SHIFT3,
                                  "--delta", "1/2", "--log-base", "2", "--output", str(report)])
    assert result.exit_code == 0
    records = _report(report)
    assert records[0]["params"] == {"log_base": "2"}
    assert records[0]["series"]["log_base"] == "2"
    assert records[0]["series"]["terms"][0]["H_k"] == pytest.approx(1.0)
    assert records[1]["params"] == {"epsilon": "1/2", "log_base": "2"}
    assert records[2]["params"] == {"delta": "1/2"}


def test_check_log_base_overrides_config(runner, tmp_path):
    report = tmp_path / "report.jsonl"
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({
        "system": {"recipe": json.loads(SHIFT3)},
        "queries": [{"property": "entropy", "params": {"k_max": 2, "log_base": "e"}}],
        "output": {"path": str(report)},
    }))
    result = runner.invoke(main, ["check", "--config", str(config), "--log-base", "2"])
    assert result.exit_code == 0
    assert _report(report)[0]["params"] == {"k_max": 2, "log_base": "2"}


def test_lift_then_validate(runner, tmp_path, system_file):
    lifted = tmp_path / "lifted.json"
    result = runner.invoke(main, ["lift", "--system", str(system_file), "-m", "2", "--output", str(lifted)])
    assert result.exit_code == 0
    assert len(json.loads(lifted.read_text())["points"]) == 3
    result = runner.invoke(main, ["validate", "--system", str(lifted)])
    assert result.exit_code == 0


def test_orbit(runner):
    result = runner.invoke(main, ["orbit", "--recipe", SHIFT3, "--point", "101", "--steps", "1"])
    assert result.exit_code == 0
    assert "010" in result.output


def test_orbit_unknown_point(runner):
    result = runner.invoke(main, ["orbit", "--recipe", SHIFT3, "--point", "222"])
    assert result.exit_code == 1


def test_entropy_series_csv(runner, tmp_path):
    path = tmp_path / "entropy.csv"
    result = runner.invoke(main, ["entropy", "--recipe", SHIFT3, "--k-max", "3",
                                  "--log-base", "2", "--output", str(path)])
    assert result.exit_code == 0
    frame = pd.read_csv(path)
    assert frame["N_k"].tolist() == [2, 4, 8]
    assert frame["H_k/k"].tolist() == pytest.approx([1.0, 1.0, 1.0])


def test_separated_entropy_needs_epsilon(runner):
    result = runner.invoke(main, ["entropy", "--recipe", SHIFT3, "--kind", "separated"])
    assert result.exit_code == 1


def test_repro_suite(runner, tmp_path):
    path = tmp_path / "suite.csv"
    result = runner.invoke(main, ["repro", "odometer-periods", "--output", str(path)])
    assert result.exit_code == 0
    frame = pd.read_csv(path)
    assert len(frame) == 8
    assert frame["pass"].all()


def test_repro_unknown_suite(runner):
    result = runner.invoke(main, ["repro", "nope"])
    assert result.exit_code == 1


def test_export_diameters(runner, tmp_path):
    path = tmp_path / "plots" / "diameters.csv"
    result = runner.invoke(main, ["export-plotdata", "--recipe", SHIFT3, "--kind", "diameter",
                                  "--steps", "2", "--output", str(path)])
    assert result.exit_code == 0
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["n", "open", "diameter", "exact"]
    assert len(frame) == 6
    assert frame["n"].max() == 2
