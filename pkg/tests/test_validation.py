"""Tests for input validation helpers"""
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperdyn.utils.validation import (
    ResourceError,
    ValidationError,
    clean_label,
    format_rational,
    parse_rational,
    validate_horizon,
    validate_path,
    validate_positive_int,
    validate_positive_rational,
)


def test_parse_rational_accepts_exact_forms():
    assert parse_rational("1/4") == Fraction(1, 4)
    assert parse_rational(" 3 / 6 ") == Fraction(1, 2)
    assert parse_rational("2") == Fraction(2)
    assert parse_rational(3) == Fraction(3)
    assert parse_rational(Fraction(5, 7)) == Fraction(5, 7)


@pytest.mark.parametrize("value", [0.25, "0.25", "1/4/2", "abc", True, [1]])
def test_parse_rational_rejects_inexact_values(value):
    with pytest.raises(ValidationError):
        parse_rational(value, field_name="delta")


def test_parse_rational_zero_denominator():
    with pytest.raises(ValidationError, match="zero denominator"):
        parse_rational("1/0")


def test_parse_rational_missing_names_field():
    with pytest.raises(ValidationError, match="epsilon is required"):
        parse_rational(None, field_name="epsilon")


@given(st.fractions())
def test_format_then_parse_is_identity(value):
    assert parse_rational(format_rational(value)) == value


def test_validate_positive_rational():
    assert validate_positive_rational("1/8") == Fraction(1, 8)
    with pytest.raises(ValidationError, match="must be positive"):
        validate_positive_rational("0")
    with pytest.raises(ValidationError, match="must be positive"):
        validate_positive_rational("-1/2")


def test_validate_positive_int_range():
    assert validate_positive_int(3) == 3
    assert validate_positive_int(4.0) == 4
    assert validate_positive_int(0, minimum=0) == 0
    with pytest.raises(ValidationError, match="at least 1"):
        validate_positive_int(0)
    with pytest.raises(ValidationError, match="cannot exceed 2"):
        validate_positive_int(3, maximum=2)
    with pytest.raises(ValidationError, match="must be an integer"):
        validate_positive_int(True)
    with pytest.raises(ValidationError, match="must be an integer"):
        validate_positive_int("3")


def test_validate_horizon_allows_none():
    assert validate_horizon(None) is None
    assert validate_horizon(5) == 5
    with pytest.raises(ValidationError):
        validate_horizon(0)


def test_validate_path(tmp_path):
    existing = tmp_path / "system.json"
    existing.write_text("{}")
    assert validate_path(str(existing), must_exist=True) == existing
    with pytest.raises(ValidationError, match="does not exist"):
        validate_path(tmp_path / "missing.json", must_exist=True)
    with pytest.raises(ValidationError, match="cannot be empty"):
        validate_path("   ")
    with pytest.raises(ValidationError, match="NUL character"):
        validate_path("bad\x00name")
    with pytest.raises(ValidationError, match=r"--output: .* is a directory"):
        validate_path(tmp_path, field_name="--output")
    with pytest.raises(ValidationError, match="system.file: no path given"):
        validate_path(None, field_name="system.file")


def test_clean_label():
    assert clean_label("Line 1\nLine 2") == "Line 1 Line 2"
    assert clean_label("x" * 120).endswith("...")
    assert len(clean_label("x" * 120)) == 60
    assert clean_label("p1\x1b[31m  p2") == "p1 [31m p2"
    assert clean_label(42) == "42"


def test_resource_error_carries_quantities():
    error = ResourceError("too big", quantity=10, limit=4, partial=[1, 2])
    assert str(error) == "too big"
    assert (error.quantity, error.limit, error.partial) == (10, 4, [1, 2])
    assert not isinstance(error, ValidationError)
