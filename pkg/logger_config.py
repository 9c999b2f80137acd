"""
Logging configuration for the cube KSBA toolkit
Console (stderr) and rotating file handlers; fields passed through
extra={...} are appended to the message as key=value pairs
"""
import logging
import logging.handlers
import sys
import time
from contextlib import contextmanager
from typing import Iterator, Optional

from config import LOG_FILE, LOG_LEVEL

# attributes every LogRecord has; anything else came in through extra
_RESERVED = set(vars(logging.LogRecord("", 0, "", 0, "", (), None))) | {"message", "asctime"}


class StructuredFormatter(logging.Formatter):
    """Formatter that renders extra fields after the message"""

    def format(self, record: logging.LogRecord) -> str:
        base = super().format(record)
        fields = {k: v for k, v in vars(record).items() if k not in _RESERVED}
        if not fields:
            return base
        return base + " | " + " ".join(f"{k}={v}" for k, v in sorted(fields.items()))


def setup_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Setup structured logger with console and file handlers

    Args:
        name: Logger name (defaults to root logger)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        return logger

    logger.setLevel(getattr(logging, LOG_LEVEL.upper(), logging.INFO))

    # stdout carries the JSON reports
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.INFO)
    console_handler.setFormatter(
        StructuredFormatter("%(asctime)s - %(levelname)s - %(message)s", datefmt="%H:%M:%S")
    )
    logger.addHandler(console_handler)

    try:
        file_handler = logging.handlers.RotatingFileHandler(
            LOG_FILE, maxBytes=10 * 1024 * 1024, backupCount=5
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            StructuredFormatter(
                "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        )
        logger.addHandler(file_handler)
    except OSError as e:
        logger.warning(f"Could not setup file logging: {e}")

    logger.propagate = False
    return logger


@contextmanager
def timed(logger: logging.Logger, label: str, **fields) -> Iterator[dict]:
    """
    Log the wall time of a block at INFO

    The yielded dict can be filled inside the block; its entries are logged
    with the duration.

    Usage:
        with timed(logger, "enumeration") as info:
            subs = enumerate_all()
            info["count"] = len(subs)
    """
    info = dict(fields)
    start = time.perf_counter()
    try:
        yield info
    finally:
        info["duration_ms"] = round((time.perf_counter() - start) * 1000, 2)
        logger.info(f"{label} finished", extra=info)
