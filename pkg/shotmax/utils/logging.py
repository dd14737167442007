import inspect
import functools
import os
import logging
from logging.handlers import RotatingFileHandler
import time

from rich.console import Console
from rich.logging import RichHandler

EVENTS_LEVEL_NUM = 38
DEFAULT_LOG_BACKUP_COUNT = 10
DEFAULT_EVENTS_RETENTION_SIZE = 64 * 1024 * 1024  # 64 MB

ROOT_LOGGER_NAME = "shotmax"

logger = logging.getLogger(__name__)


def setup_logging(level: str | int = "WARNING") -> logging.Logger:
    """Route the package loggers to stderr through rich.

    Standard output is reserved for emitted tables, so the handler always
    writes to stderr.
    """
    root = logging.getLogger(ROOT_LOGGER_NAME)
    root.setLevel(level)

    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)

    handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        rich_tracebacks=False,
    )
    handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(handler)
    return root


def setup_events_logger(
    full_path: str,
    events_retention_size: int = DEFAULT_EVENTS_RETENTION_SIZE,
) -> logging.Logger:
    """Write experiment rows at the custom EVENT level to ``events.log``."""
    logging.addLevelName(EVENTS_LEVEL_NUM, "EVENT")

    events = logging.getLogger(f"{ROOT_LOGGER_NAME}.event")
    events.setLevel(EVENTS_LEVEL_NUM)

    os.makedirs(full_path, exist_ok=True)

    formatter = logging.Formatter(
        "%(asctime)s | %(levelname)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    file_handler = RotatingFileHandler(
        os.path.join(full_path, "events.log"),
        maxBytes=events_retention_size,
        backupCount=DEFAULT_LOG_BACKUP_COUNT,
    )
    file_handler.setFormatter(formatter)
    file_handler.setLevel(EVENTS_LEVEL_NUM)
    events.addHandler(file_handler)

    return events


def log_event(message: str, *args) -> None:
    events = logging.getLogger(f"{ROOT_LOGGER_NAME}.event")
    if events.isEnabledFor(EVENTS_LEVEL_NUM):
        events.log(EVENTS_LEVEL_NUM, message, *args)


def print_execution_time(func):
    @functools.wraps(func)
    async def async_wrapper(*args, **kwargs):
        start = time.time()
        result = await func(*args, **kwargs)
        end = time.time()
        logger.info(
            f"Execution time for {func.__name__}: {end - start:.4f} seconds"
        )
        return result

    @functools.wraps(func)
    def sync_wrapper(*args, **kwargs):
        start = time.time()
        result = func(*args, **kwargs)
        end = time.time()
        logger.info(
            f"Execution time for {func.__name__}: {end - start:.4f} seconds"
        )
        return result

    if inspect.iscoroutinefunction(func):
        return async_wrapper
    else:
        return sync_wrapper
