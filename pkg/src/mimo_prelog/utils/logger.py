"""Loguru setup for the pre-log toolkit: diagnostics on stderr, optional log file."""

import logging
import sys
from pathlib import Path
from typing import Optional

from loguru import logger

from .display import get_rich_handler

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{extra[name]}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = (
    "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | "
    "{extra[name]}:{function}:{line} - {message}"
)


def _stdlib_level(name: str) -> int:
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.INFO


def setup_logger(
    log_level: str = "WARNING",
    log_file: Optional[str] = None,
    rotation: str = "10 MB",
    retention: str = "1 week",
    use_rich: bool = False,
) -> "logger":
    """
    Route loguru records to standard error and, optionally, a rotating file.

    Reports own standard output; nothing configured here writes to it.

    Args:
        log_level: DEBUG, INFO, WARNING, ERROR or CRITICAL
        log_file: Extra plain-text sink; parent directories are created
        rotation: Loguru rotation rule for the file sink
        retention: Loguru retention rule for the file sink
        use_rich: Render console records through the Rich handler

    Returns:
        The configured loguru logger
    """
    level = log_level.upper()
    logger.remove()
    logger.configure(extra={"name": "mimo_prelog"})

    if use_rich:
        bridge = logging.getLogger("mimo_prelog")
        bridge.setLevel(level)
        bridge.handlers = [get_rich_handler()]
        bridge.propagate = False
        logger.add(
            lambda message: bridge.log(
                _stdlib_level(message.record["level"].name), message.rstrip("\n")
            ),
            level=level,
            format="{message}",
            colorize=False,
        )
    else:
        logger.add(
            sys.stderr,
            level=level,
            format=CONSOLE_FORMAT,
            colorize=sys.stderr.isatty(),
        )

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            path,
            level=level,
            format=FILE_FORMAT,
            rotation=rotation,
            retention=retention,
            enqueue=True,
        )

    return logger


def get_logger(name: str) -> "logger":
    """Logger whose records carry ``name`` (usually the module's ``__name__``)."""
    return logger.bind(name=name)


class LoggerMixin:
    """Adds a ``logger`` bound to ``module.ClassName``."""

    @property
    def logger(self) -> "logger":
        return get_logger(f"{self.__class__.__module__}.{self.__class__.__name__}")


def log_performance(operation: str, duration: float, **metrics) -> None:
    """INFO record with the wall time of ``operation`` and any counters supplied."""
    details = ", ".join(
        f"{key}={value:.6g}" if isinstance(value, float) else f"{key}={value}"
        for key, value in metrics.items()
    )
    suffix = f" ({details})" if details else ""
    get_logger("performance").info(f"{operation} took {duration:.3f}s{suffix}")
