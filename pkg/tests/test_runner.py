"""Tests for the experiment runner"""
import json
import os
import subprocess
import sys
import time
from pathlib import Path

import pytest

from hyperdyn.config import QUERY_PROPERTIES, ExperimentConfig
from hyperdyn.runner import QUERY_PARAMS, ExperimentRunner, build_system, run
from hyperdyn.utils.report_writer import ReportWriter, verify_chain
from hyperdyn.utils.validation import ValidationError

SHIFT3 = {"recipe": {"kind": "full_shift", "length": 3, "depth": 1}}


def _config(queries, system=None, **extra):
    return ExperimentConfig.from_dict({"system": system or SHIFT3, "queries": queries, **extra})


def test_every_property_has_a_parameter_list():
    assert set(QUERY_PARAMS) == set(QUERY_PROPERTIES)


def test_run_writes_one_record_per_query():
    config = _config([
        {"property": "sensitive", "params": {"delta": "1/2"}},
        {"property": "transitive"},
        {"property": "entropy", "params": {"k_max": 3}},
    ])
    result = run(config, ReportWriter())
    assert result.exit_code == 0
    assert [r["record_type"] for r in result.records] == ["verdict", "verdict", "series"]
    assert [r["index"] for r in result.records] == [0, 1, 2]
    assert result.records[0]["status"] == "Holds"
    assert result.records[0]["params"] == {"delta": "1/2"}
    assert result.records[0]["target"] == "base"
    assert [t["N_k"] for t in result.records[2]["series"]["terms"]] == [2, 4, 8]


def test_lifted_target():
    config = _config([{"property": "dense_periodic"}], target="lifted:2")
    result = run(config, ReportWriter())
    record = result.records[0]
    assert record["target"] == "lifted:2"
    assert record["status"] == "Fails"


def test_unknown_parameter_names_its_path():
    config = _config([{"property": "transitive"}, {"property": "sensitive", "params": {"delta": "1/2", "eps": 1}}])
    with pytest.raises(ValidationError, match=r"queries\[1\]\.params\.eps"):
        ExperimentRunner(config)


def test_missing_delta_is_rejected():
    with pytest.raises(ValidationError, match=r"queries\[0\]\.params\.delta is required"):
        ExperimentRunner(_config([{"property": "expansive"}]))


def test_bad_parameter_value_becomes_error_record():
    config = _config([
        {"property": "sensitive", "params": {"delta": "0.5"}},
        {"property": "transitive"},
    ])
    result = run(config, ReportWriter())
    assert result.exit_code == 1
    assert result.errors == 1
    error, ok = result.records
    assert error["record_type"] == "error"
    assert "queries[0].params" in error["message"]
    assert ok["status"] == "Holds"


def test_budget_exhaustion_is_recorded_not_fatal():
    config = _config(
        [{"property": "transitive"}, {"property": "sensitive", "params": {"delta": "1/2"}}],
        target="lifted:2",
        budget={"max_hyperspace_points": 1},
    )
    result = run(config, ReportWriter())
    assert result.exit_code == 0
    assert [r["record_type"] for r in result.records] == ["resource_error", "resource_error"]
    assert result.records[0]["quantity"] == 36
    assert result.records[0]["limit"] == 1


def test_entropy_budget_records_partial_series():
    config = _config(
        [{"property": "entropy", "params": {"k_max": 6}}],
        system={"recipe": {"kind": "full_shift", "length": 6, "depth": 1}},
        budget={"max_join_sets": 8},
    )
    record = run(config, ReportWriter()).records[0]
    assert record["record_type"] == "resource_error"
    assert [t["N_k"] for t in record["partial"]["terms"]] == [2, 4, 8]


def test_trace_budget_applies_to_built_systems():
    family, _ = build_system(SHIFT3, budget=_config([{"property": "transitive"}],
                                                     budget={"max_trace_length": 2}).budget)
    assert family.trace_limit == 2
    config = _config([{"property": "transitive"}], budget={"max_trace_length": 2})
    record = run(config, ReportWriter()).records[0]
    assert record["record_type"] == "resource_error"


def test_grid_records_are_marked_discretized():
    config = _config(
        [{"property": "sensitive", "params": {"delta": "1/4"}}],
        system={"recipe": {"kind": "interval_grid", "map": "tent", "cells": 8, "spans": [3]}},
    )
    record = run(config, ReportWriter()).records[0]
    assert record["discretized"] is True
    assert record["status"] == "Holds"


def test_description_system(two_point_description):
    config = _config([{"property": "dense_periodic"}], system={"description": two_point_description})
    assert run(config, ReportWriter()).records[0]["status"] == "Holds"


def test_bad_system_is_a_validation_error(two_point_description):
    two_point_description["maps"] = [["a", "q"]]
    config = _config([{"property": "dense_periodic"}], system={"description": two_point_description})
    with pytest.raises(ValidationError, match=r"system\.description: maps\[0\]"):
        run(config, ReportWriter())


def test_system_file(tmp_path, two_point_description):
    path = tmp_path / "system.json"
    path.write_text(json.dumps(two_point_description))
    config = _config([{"property": "transitive"}], system={"file": str(path)})
    assert run(config, ReportWriter()).records[0]["status"] == "Holds"


def test_report_file_is_deterministic(tmp_path):
    queries = [
        {"property": "scrambled_pairs", "params": {"delta": "1/4", "horizon": 4, "window": 4}},
        {"property": "equicontinuous", "params": {"mode": "pointwise"}},
        {"property": "separated_entropy", "params": {"epsilon": "3/4", "n_max": 3, "log_base": "2"}},
    ]
    paths = []
    for name in ("a.jsonl", "b.jsonl"):
        config = _config(queries, output={"path": str(tmp_path / name)}, workers=2)
        result = run(config)
        paths.append(result.report_path)
    first, second = (p.read_text() for p in paths)
    assert first == second
    assert verify_chain(json.loads(line) for line in first.splitlines())


def test_timing_is_opt_in():
    config = _config([{"property": "transitive"}], output={"include_timing": True})
    assert "wall_time_ms" in run(config, ReportWriter()).records[0]
    plain = _config([{"property": "transitive"}])
    assert "wall_time_ms" not in run(plain, ReportWriter()).records[0]


def test_hash_chain_follows_output_config():
    chained = run(_config([{"property": "transitive"}]))
    assert "_hash" in chained.records[0]
    plain = run(_config([{"property": "transitive"}], output={"hash_chain": False}))
    assert "_hash" not in plain.records[0]
    assert plain.records[0]["status"] == "Holds"


def test_every_property_runs():
    defaults = {
        "sensitive": {"delta": "1/2"},
        "cofinitely_sensitive": {"delta": "1/2"},
        "scrambled_pairs": {"delta": "1/2"},
        "li_yorke_sensitive": {"delta": "1/2"},
        "scrambled_set": {"delta": "1/2"},
        "expansive": {"delta": "1/2", "start": 0},
        "separated_entropy": {"epsilon": "1/2", "n_max": 2},
        "entropy": {"k_max": 2},
        "hyper_entropy": {"k_max": 2},
    }
    queries = [{"property": name, "params": defaults.get(name, {})} for name in QUERY_PARAMS]
    result = run(_config(queries), ReportWriter())
    assert result.errors == 0
    assert len(result.records) == len(QUERY_PARAMS)
    assert [r["property"] for r in result.records] == list(QUERY_PARAMS)


STALLED_RUN = """
import multiprocessing
import time

from hyperdyn import runner
from hyperdyn.config import ExperimentConfig
from hyperdyn.utils.report_writer import ReportWriter


def stall(family, params, budget):
    time.sleep(120)


if __name__ == "__main__":
    multiprocessing.set_start_method("fork")
    runner.HANDLERS["transitive"] = stall
    config = ExperimentConfig.from_dict({
        "system": {"recipe": {"kind": "full_shift", "length": 3, "depth": 1}},
        "queries": [{"property": "transitive"}, {"property": "sensitive", "params": {"delta": "1/2"}}],
        "budget": {"wall_clock_seconds": 1},
        "workers": 2,
    })
    result = runner.run(config, ReportWriter())
    print(",".join(r["record_type"] for r in result.records))
"""


@pytest.mark.skipif(sys.platform == "win32", reason="needs the fork start method")
def test_wall_clock_stops_the_whole_process():
    src = str(Path(__file__).resolve().parents[1] / "src")
    env = {**os.environ, "PYTHONPATH": os.pathsep.join(filter(None, [src, os.environ.get("PYTHONPATH")]))}
    started = time.monotonic()
    completed = subprocess.run([sys.executable, "-c", STALLED_RUN], capture_output=True, text=True,
                               env=env, timeout=90)
    elapsed = time.monotonic() - started
    assert completed.returncode == 0, completed.stderr
    assert completed.stdout.strip().splitlines()[-1] == "resource_error,verdict"
    assert elapsed < 60
