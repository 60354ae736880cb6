"""
Logging configuration for hyperdyn commands

Console records are rendered by rich on stderr; stdout is reserved for
reports. The optional log file gets one JSON object per record.
"""
import logging
from pathlib import Path
from typing import Optional

from pythonjsonlogger import jsonlogger
from rich.console import Console
from rich.logging import RichHandler

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def setup_logging(log_level: str = "INFO", log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure the root logger for one hyperdyn run

    Args:
        log_level: One of LOG_LEVELS, any case; unknown names fall back to INFO
        log_file: Path of a JSON log file (optional)

    Returns:
        The root logger
    """
    name = (log_level or "INFO").upper()
    level = getattr(logging, name) if name in LOG_LEVELS else logging.INFO

    root = logging.getLogger()
    root.setLevel(level)
    root.handlers = []

    console_handler = RichHandler(console=Console(stderr=True), show_path=False)
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter("%(name)s: %(message)s", datefmt="[%X]"))
    root.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_path)
        file_handler.setLevel(level)
        file_handler.setFormatter(jsonlogger.JsonFormatter(
            "%(asctime)s %(name)s %(levelname)s %(message)s",
            static_fields={"app": "hyperdyn"},
        ))
        root.addHandler(file_handler)

    if name not in LOG_LEVELS:
        root.warning(f"Unknown log level '{log_level}', using INFO")
    return root
