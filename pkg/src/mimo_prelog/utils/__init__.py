"""Configuration, logging, console display, serialization and random streams."""

from .config import Config, OutputSettings, get_config
from .logger import LoggerMixin, get_logger, log_performance, setup_logger

__all__ = [
    "Config",
    "LoggerMixin",
    "OutputSettings",
    "get_config",
    "get_logger",
    "log_performance",
    "setup_logger",
]
