"""Tests for equicontinuity on finite models"""
from fractions import Fraction

import pytest

from hyperdyn.detectors import check_equicontinuous
from hyperdyn.hyperspace import as_hyper_system
from hyperdyn.utils.validation import ValidationError
from hyperdyn.zoo import make_permutation


def test_tent_grid_breaks_the_floor(tent8):
    verdict = check_equicontinuous(tent8)
    assert verdict.fails
    assert verdict.exact
    assert verdict.witness["epsilon"] == Fraction(1, 8)
    assert (verdict.witness["x"], verdict.witness["y"]) == ("c0", "c1")
    assert verdict.witness["n"] == 1
    assert verdict.witness["distance_at_n"] == Fraction(1, 4)


def test_rotation_uniform_delta_table(rotation4):
    verdict = check_equicontinuous(rotation4, mode="uniform")
    assert verdict.holds
    assert verdict.witness["delta_by_epsilon"] == [
        [Fraction(1, 4), Fraction(1, 4)],
        [Fraction(1, 2), Fraction(1, 2)],
    ]


def test_rotation_pointwise_delta_table(rotation4):
    verdict = check_equicontinuous(rotation4, mode="pointwise")
    assert verdict.holds
    assert verdict.witness["delta_by_point"] == [[str(i), Fraction(1, 4)] for i in range(4)]


def test_lifted_isometry_is_equicontinuous(rotation4):
    assert check_equicontinuous(as_hyper_system(rotation4, 2)).holds


def test_shift_is_not_equicontinuous(shift3):
    assert check_equicontinuous(shift3).fails


def test_one_point_space():
    verdict = check_equicontinuous(make_permutation([0]))
    assert verdict.holds


def test_unknown_mode(rotation4):
    with pytest.raises(ValidationError, match="mode"):
        check_equicontinuous(rotation4, mode="sideways")
