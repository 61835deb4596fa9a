"""Logging setup for nugrass"""

import logging

from rich.console import Console
from rich.logging import RichHandler

try:
    from config.settings import LOG_FORMAT, LOG_LEVELS, LOGGER_NAME
except ImportError:
    from src.config.settings import LOG_FORMAT, LOG_LEVELS, LOGGER_NAME


def get_logger(name: str) -> logging.Logger:
    """Child logger under the package logger, e.g. ``nugrass.grassmannian``"""
    return logging.getLogger(f"{LOGGER_NAME}.{name}")


def configure_logging(verbosity: int = 0) -> logging.Logger:
    """Route package logs to stderr through rich; stdout stays reserved for reports"""
    level = LOG_LEVELS.get(min(verbosity, max(LOG_LEVELS)), "WARNING")
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    logger.propagate = False
    return logger
