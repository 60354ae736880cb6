"""
Input validation utilities for hyperdyn

Provides validation for every user-facing input:
- Exact rational parameters (δ, ε) written as "p/q" strings
- Horizons, orders and other positive integers
- Budget ceilings and file paths

All helpers raise ValidationError (an "input error"); budget exhaustion is
reported separately through ResourceError.
"""
import math
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

_RATIONAL_RE = re.compile(r'^\s*-?\d+(\s*/\s*\d+)?\s*$')
_UNPRINTABLE_RE = re.compile(r'[\x00-\x1f\x7f-\x9f]+')


class ValidationError(ValueError):
    """Custom exception for validation errors"""
    pass


class ResourceError(Exception):
    """Raised when a computation would exceed a configured budget."""

    def __init__(self, message: str, quantity: Optional[int] = None,
                 limit: Optional[int] = None, partial: Any = None):
        super().__init__(message)
        self.quantity = quantity
        self.limit = limit
        self.partial = partial


def parse_rational(
    value: Union[str, int, Fraction, None],
    field_name: str = "Value"
) -> Fraction:
    """
    Parse an exact rational.

    Args:
        value: "p/q" string, integer string, int or Fraction
        field_name: Name of field for error messages

    Returns:
        The value as a Fraction

    Raises:
        ValidationError: If the value is not an exact rational

    Examples:
        >>> parse_rational("1/4")
        Fraction(1, 4)
        >>> parse_rational(0.25)
        ValidationError: Value must be an exact rational
    """
    if value is None:
        raise ValidationError(f"{field_name} is required")

    if isinstance(value, bool):
        raise ValidationError(f"{field_name} must be an exact rational, got bool")

    if isinstance(value, Fraction):
        return value

    if isinstance(value, int):
        return Fraction(value)

    if isinstance(value, str):
        if not _RATIONAL_RE.match(value):
            raise ValidationError(
                f"{field_name} must be an exact rational 'p/q', got '{value}'"
            )
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise ValidationError(f"{field_name} has a zero denominator: '{value}'")

    # floats are never exact enough
    raise ValidationError(
        f"{field_name} must be an exact rational, got {type(value).__name__}"
    )


def validate_positive_rational(
    value: Union[str, int, Fraction, None],
    field_name: str = "delta"
) -> Fraction:
    """
    Validate a strictly positive rational threshold (δ or ε).

    Raises:
        ValidationError: If the value is missing, malformed or ≤ 0
    """
    parsed = parse_rational(value, field_name=field_name)
    if parsed <= 0:
        raise ValidationError(f"{field_name} must be positive, got {parsed}")
    return parsed


def validate_positive_int(
    value: Any,
    field_name: str = "Value",
    minimum: int = 1,
    maximum: Optional[int] = None
) -> int:
    """
    Validate an integer parameter within [minimum, maximum].

    Raises:
        ValidationError: If value is not an integer in range
    """
    if value is None:
        raise ValidationError(f"{field_name} is required")

    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and math.isfinite(value) and value.is_integer():
            value = int(value)
        else:
            raise ValidationError(
                f"{field_name} must be an integer, got {type(value).__name__}"
            )

    if value < minimum:
        raise ValidationError(f"{field_name} must be at least {minimum}, got {value}")

    if maximum is not None and value > maximum:
        raise ValidationError(f"{field_name} cannot exceed {maximum}, got {value}")

    return value


def validate_horizon(value: Any, field_name: str = "horizon") -> Optional[int]:
    """A horizon is either None (exact, full trace) or a positive integer."""
    if value is None:
        return None
    return validate_positive_int(value, field_name=field_name)


def validate_path(
    path: Union[str, Path, None],
    must_exist: bool = False,
    field_name: str = "path"
) -> Path:
    """
    Check a system, config or report path.

    Args:
        path: As written in a config or passed on the command line
        must_exist: Systems and configs are read, so they must be existing files
        field_name: Option name or dotted config path used in messages

    Raises:
        ValidationError: If the path is empty, unreadable as text or names a directory
    """
    if path is None:
        raise ValidationError(f"{field_name}: no path given")
    if not isinstance(path, (str, Path)):
        raise ValidationError(f"{field_name} must be a path string, got {type(path).__name__}")

    text = str(path)
    if not text.strip():
        raise ValidationError(f"{field_name}: path cannot be empty")
    if "\x00" in text:
        raise ValidationError(f"{field_name}: path contains a NUL character")

    location = Path(text)
    if location.is_dir():
        raise ValidationError(f"{field_name}: {clean_label(text, 200)} is a directory, expected a file")
    if must_exist and not location.exists():
        raise ValidationError(f"{field_name}: {clean_label(text, 200)} does not exist")
    return location


def format_rational(value: Fraction) -> str:
    """Canonical "p/q" form used in description files and reports."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def clean_label(value: Any, max_length: int = 60) -> str:
    """
    A user-supplied name (property, point id, open name, file path) fit for one message line.

    Runs of control characters become one space; names longer than
    max_length are cut and end in "...".

    Examples:
        >>> clean_label("p1\\np2")
        'p1 p2'
    """
    text = " ".join(_UNPRINTABLE_RE.sub(" ", str(value)).split())
    if len(text) > max_length:
        return text[:max_length - 3] + "..."
    return text
