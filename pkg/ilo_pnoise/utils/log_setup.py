"""
Logging Setup

Installs the Rich console handler and an optional size-rotating log file for
CLI runs. Library modules only create loggers; handlers are configured here,
once, by the command-line entry point.

Author: ILO PNoise Team
"""

import logging
import logging.handlers
from pathlib import Path
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

LOG_FORMAT = "%(asctime)s %(levelname)-8s %(name)s: %(message)s"


def configure_logging(
    level: str = "INFO",
    file: Optional[str] = None,
    max_size_mb: int = 10,
    backup_count: int = 3,
    console: Optional[Console] = None,
) -> logging.Logger:
    """
    Configure the ``ilo_pnoise`` logger hierarchy.

    Args:
        level: Minimum level name (DEBUG, INFO, WARNING, ERROR)
        file: Optional log file path; rotated when it exceeds max_size_mb
        max_size_mb: Rotation threshold in megabytes
        backup_count: Number of rotated files to keep
        console: Rich console to log to (stderr console if None)

    Returns:
        The configured package logger
    """
    logger = logging.getLogger("ilo_pnoise")
    logger.setLevel(level.upper())

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    rich_handler = RichHandler(
        console=console or Console(stderr=True),
        show_path=False,
        rich_tracebacks=True,
        markup=False,
    )
    rich_handler.setLevel(level.upper())
    logger.addHandler(rich_handler)

    if file:
        log_path = Path(file).expanduser()
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            log_path,
            maxBytes=max_size_mb * 1024 * 1024,
            backupCount=backup_count,
            encoding="utf-8",
        )
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        file_handler.setLevel(level.upper())
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger
