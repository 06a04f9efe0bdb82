import logging
from enum import Enum
from pathlib import Path
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler


class LogLevel(str, Enum):
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


def setup_logging(level: LogLevel = LogLevel.INFO, log_file: Optional[Path] = None) -> None:
    """
    Configures the root logger for the application.

    Rich output goes to stderr so that commands printing CSV or JSON to stdout
    stay pipeable.

    Args:
        level: The minimum logging level to display.
        log_file: Optional path receiving a plain-text copy of every record.
    """
    handlers: list[logging.Handler] = [
        RichHandler(console=Console(stderr=True), rich_tracebacks=True, show_path=False)
    ]
    if log_file is not None:
        file_handler = logging.FileHandler(log_file, mode="w", encoding="utf-8")
        file_handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s - %(message)s")
        )
        handlers.append(file_handler)

    logging.basicConfig(
        level=level.value,
        format="%(name)s - %(message)s",
        handlers=handlers,
        force=True,
    )
