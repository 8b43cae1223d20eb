"""
Service module for structured logging.
"""

import logging
import sys

import structlog

from settings import LOG_FORMAT, LOG_LEVEL


def _stderr_logger(*_args) -> structlog.PrintLogger:
    # sys.stderr is read per logger; test runners replace it.
    return structlog.PrintLogger(file=sys.stderr)


def configure_logging(level: str = LOG_LEVEL, fmt: str = LOG_FORMAT) -> None:
    """
    Configure structlog for the whole process.

    Events are rendered as key-value pairs on stderr so that command
    output on stdout stays machine readable.

    Args:
        level (str): Minimum level name ('DEBUG', 'INFO', 'WARNING', ...).
        fmt (str): 'console' for human-readable lines, 'json' for one JSON
            object per event.
    """
    if fmt == 'json':
        renderers = [structlog.processors.dict_tracebacks, structlog.processors.JSONRenderer()]
    else:
        renderers = [structlog.dev.ConsoleRenderer(colors=False)]

    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt='iso'),
            *renderers,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.getLevelName(level.upper())),
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )
