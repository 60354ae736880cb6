"""Tests for the reproduction suites"""
import pytest

from hyperdyn.suites import SUITE_COLUMNS, SUITES, repro
from hyperdyn.utils.validation import ValidationError


def _pairs(frame):
    return list(zip(frame["base_verdict"], frame["lifted_verdict"]))


def test_odometer_periods():
    frame = repro("odometer-periods")
    assert list(frame.columns) == SUITE_COLUMNS
    assert len(frame) == 8
    assert frame["pass"].all()
    assert frame.loc[0, "relation_observed"] == "period 16"


def test_alias_runs_the_same_suite():
    assert repro("example-1").equals(repro("odometer-periods"))


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_every_suite_passes(suite):
    frame = repro(suite)
    assert list(frame.columns) == SUITE_COLUMNS
    assert len(frame) > 0
    assert (frame["proposition"] == suite).all()
    assert frame["pass"].all(), frame[~frame["pass"]].to_dict(orient="records")


@pytest.mark.parametrize("suite", ["transitivity-pullback", "mixing-agreement", "metric-laws"])
def test_suites_are_deterministic(suite):
    assert repro(suite).equals(repro(suite))


def test_periodic_lift_covers_every_dense_periodic_base():
    frame = repro("prop-periodic-lift")
    assert (frame["base_verdict"] == "Holds").all()
    assert (frame["lifted_verdict"] == "Holds").all()


def test_mixing_agreement_has_both_outcomes():
    frame = repro("mixing-agreement")
    assert len(frame) == 24
    pairs = _pairs(frame)
    assert ("Holds", "Holds") in pairs
    assert ("Fails", "Fails") in pairs
    folded = frame[frame["instance"] == "fold-swap(2,2)"]
    assert _pairs(folded) == [("Holds", "Holds")]


@pytest.mark.parametrize("suite, rows", [
    ("transitivity-pullback", 50),
    ("sensitivity-pullback", 13),
    ("expansive-pullback", 26),
    ("strong-sensitivity", 4),
])
def test_relations_are_not_vacuous(suite, rows):
    frame = repro(suite)
    assert len(frame) == rows
    assert ("Holds", "Holds") in _pairs(frame)
    assert ("Fails", "Fails") in _pairs(frame)


def test_entropy_rows():
    frame = repro("entropy")
    assert list(frame["instance"]) == [
        "sigma(2,12) k_max=10", "identity(2,12) k_max=10", "sigma(2,8) m=2 k_max=6",
    ]
    assert frame["pass"].all()


def test_metric_laws_rows():
    frame = repro("metric-laws")
    assert frame.loc[1, "relation_observed"] == "200/200 consistent"
    singletons = frame[frame["instance"].str.endswith("singletons")]
    assert len(singletons) == 6
    assert (singletons["relation_observed"] == "isometric").all()


def test_unknown_suite():
    with pytest.raises(ValidationError, match="unknown suite 'nope'"):
        repro("nope")


def test_suite_registry():
    assert "all" not in SUITES
    assert {"prop-periodic-lift", "odometer-periods", "entropy", "metric-laws"} <= set(SUITES)
