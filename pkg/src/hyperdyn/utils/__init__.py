"""Utilities module initialization"""

from hyperdyn.utils.logging_config import setup_logging
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
from hyperdyn.utils.report_writer import (
    RecordType,
    ReportWriter,
    verify_chain,
)

__all__ = [
    "setup_logging",
    "ResourceError",
    "ValidationError",
    "clean_label",
    "format_rational",
    "parse_rational",
    "validate_horizon",
    "validate_path",
    "validate_positive_int",
    "validate_positive_rational",
    "RecordType",
    "ReportWriter",
    "verify_chain",
]
