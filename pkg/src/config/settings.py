"""Process-wide settings: environment and logging."""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Union

from dotenv import load_dotenv

LOG_ENV = "OPSIM_LOG"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_handlers: dict[str, logging.Handler] = {}


def log_level_from_env(default: str = "INFO") -> str:
    """Level named by ``OPSIM_LOG`` after loading a ``.env`` file, if any."""
    load_dotenv()
    return os.getenv(LOG_ENV, default).upper()


def setup_logging(level: Union[str, int, None] = None, log_file: Union[str, Path, None] = None) -> None:
    """Configure the root logger: one stream handler plus at most one file handler.

    Calling again replaces the file handler and updates the level.
    """
    if level is None:
        level = log_level_from_env()
    root = logging.getLogger()
    root.setLevel(level)
    formatter = logging.Formatter(LOG_FORMAT)
    if "stream" not in _handlers:
        _handlers["stream"] = logging.StreamHandler()
        _handlers["stream"].setFormatter(formatter)
        root.addHandler(_handlers["stream"])
    if log_file is not None:
        previous = _handlers.pop("file", None)
        if previous is not None:
            root.removeHandler(previous)
            previous.close()
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(path, encoding="utf-8")
        handler.setFormatter(formatter)
        root.addHandler(handler)
        _handlers["file"] = handler


def close_log_file() -> None:
    handler = _handlers.pop("file", None)
    if handler is not None:
        logging.getLogger().removeHandler(handler)
        handler.close()
