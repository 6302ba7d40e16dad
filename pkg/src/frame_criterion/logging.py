from __future__ import annotations

import logging
import sys
from typing import TYPE_CHECKING

import structlog

if TYPE_CHECKING:
    from pathlib import Path

_LOGGING_CONFIGURED: tuple[str, str] | None = None

_LEVELS: dict[str, int] = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}


def setup_logging(filename: str | Path | None = None, level: str = "info") -> structlog.BoundLogger:
    """Set up structured logging for the frame_criterion package.

    Logs always go to stderr or to a file, never to stdout (reports are written there).

    Args:
        filename: Optional path to a log file. If None, logs are written to stderr.
        level: Minimum level name (``debug``, ``info``, ``warning`` or ``error``).

    Returns:
        A structlog logger instance configured for the frame_criterion package.
    """
    global _LOGGING_CONFIGURED  # noqa: PLW0603
    key = (str(filename or ""), level)
    if _LOGGING_CONFIGURED != key:
        numeric_level = _LEVELS.get(level.lower(), logging.INFO)
        handlers: list[logging.Handler] = []
        if filename:
            handlers.append(logging.FileHandler(str(filename), encoding="utf-8"))
        else:
            handlers.append(logging.StreamHandler(sys.stderr))

        logging.basicConfig(
            level=numeric_level,
            handlers=handlers,
            format="%(message)s",
            force=True,
        )
        structlog.configure(
            processors=[
                structlog.processors.TimeStamper(fmt="iso"),
                structlog.processors.add_log_level,
                structlog.processors.StackInfoRenderer(),
                structlog.processors.format_exc_info,
                structlog.processors.JSONRenderer(),
            ],
            wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
            context_class=dict,
            logger_factory=structlog.stdlib.LoggerFactory(),
            cache_logger_on_first_use=False,
        )
        _LOGGING_CONFIGURED = key

    return structlog.get_logger("frame_criterion")


logger = setup_logging()
