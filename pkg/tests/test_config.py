"""Tests for budgets, settings and experiment configs"""
import json

import pytest

from hyperdyn.config import Budget, ExperimentConfig, Settings, parse_target
from hyperdyn.utils.validation import ValidationError


def _config(**overrides):
    data = {
        "system": {"recipe": {"kind": "full_shift", "length": 3, "depth": 1}},
        "queries": [{"property": "sensitive", "params": {"delta": "1/2"}}],
    }
    data.update(overrides)
    return data


def test_budget_from_env_key_value_pairs():
    budget = Budget.from_env_value("max_hyperspace_points=10, max_join_sets=4096")
    assert budget.max_hyperspace_points == 10
    assert budget.max_join_sets == 4096
    assert budget.max_points == Budget().max_points


def test_budget_from_env_json():
    budget = Budget.from_env_value('{"wall_clock_seconds": 5}')
    assert budget.wall_clock_seconds == 5


@pytest.mark.parametrize("raw", ["max_points", "max_points=abc", "bogus=3", "[1, 2]", "{bad json"])
def test_budget_from_env_rejects_malformed(raw):
    with pytest.raises(ValidationError):
        Budget.from_env_value(raw)


def test_budget_rejects_non_positive_ceiling():
    with pytest.raises(ValidationError, match="budget.max_points"):
        Budget(max_points=0)


def test_settings_read_environment(monkeypatch, tmp_path):
    env_file = tmp_path / ".env"
    env_file.write_text("")
    monkeypatch.setenv("HYPERDYN_BUDGET", "max_points=99")
    monkeypatch.setenv("HYPERDYN_WORKERS", "3")
    monkeypatch.setenv("HYPERDYN_LOG_LEVEL", "DEBUG")
    settings = Settings(str(env_file))
    assert settings.budget.max_points == 99
    assert settings.workers == 3
    assert settings.log_level == "DEBUG"


def test_settings_reject_bad_workers(monkeypatch, tmp_path):
    env_file = tmp_path / ".env"
    env_file.write_text("")
    monkeypatch.setenv("HYPERDYN_WORKERS", "many")
    with pytest.raises(ValidationError, match="HYPERDYN_WORKERS"):
        Settings(str(env_file))


def test_parse_target():
    assert parse_target("base") is None
    assert parse_target(None) is None
    assert parse_target("lifted:3") == 3
    for bad in ("lifted:x", "lifted:0", "hyper", 7):
        with pytest.raises(ValidationError):
            parse_target(bad)


def test_experiment_config_defaults():
    config = ExperimentConfig.from_dict(_config())
    assert config.target == "base"
    assert config.lifted_cardinality is None
    assert config.output.format == "jsonl"
    assert config.workers == 1
    assert config.queries[0].params == {"delta": "1/2"}


def test_experiment_config_round_trip():
    config = ExperimentConfig.from_dict(_config(target="lifted:2", budget={"max_points": 500}))
    again = ExperimentConfig.from_dict(config.to_dict())
    assert again.to_dict() == config.to_dict()
    assert again.budget.max_points == 500
    assert again.lifted_cardinality == 2


def test_experiment_config_names_bad_query():
    data = _config(queries=[{"property": "sensitive"}, {"property": "chaos"}])
    with pytest.raises(ValidationError, match=r"queries\[1\]\.property"):
        ExperimentConfig.from_dict(data)


@pytest.mark.parametrize("overrides, message", [
    ({"system": {}}, "exactly one of"),
    ({"queries": []}, "nonempty list"),
    ({"target": "lifted"}, "target"),
    ({"output": {"format": "xml"}}, "output.format"),
    ({"budget": {"max_cats": 1}}, "budget.max_cats"),
    ({"extra": 1}, "unknown fields"),
])
def test_experiment_config_rejects(overrides, message):
    with pytest.raises(ValidationError, match=message):
        ExperimentConfig.from_dict(_config(**overrides))


def test_experiment_config_from_file(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(_config()))
    config = ExperimentConfig.from_file(path, base_budget=Budget(max_points=1000))
    assert config.budget.max_points == 1000

    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ValidationError, match="Invalid JSON"):
        ExperimentConfig.from_file(broken)
