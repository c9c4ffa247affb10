"""Tabular views and CSV export of stored results."""

from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from .base import MemoryStore, ResultStore
from .file import FileStore
from .keys import MEMORY, ResultKey, StoreConfig

CSV_COLUMNS = ["execution_time", "horizon_step", "component", "value", "realized_flag"]
STORE_FILE = Path("store") / "results.opsim"


def make_store(config: StoreConfig, output_dir: Union[str, Path]) -> ResultStore:
    """Store for a simulation writing into ``output_dir``."""
    if config.backend == MEMORY:
        return MemoryStore(config)
    return FileStore(Path(output_dir) / STORE_FILE, config)


def result_frame(store: ResultStore, key: ResultKey, include_lookahead: bool = True) -> pd.DataFrame:
    """Long table of every matrix under ``key``, one row per (execution, step, component)."""
    layout = store.layout(key)
    n_steps, n_components = layout.shape
    frames = []
    for at in store.execution_times(key):
        matrix = store.read_result(key, at)
        steps = np.repeat(np.arange(1, n_steps + 1), n_components)
        frames.append(
            pd.DataFrame(
                {
                    "execution_time": at,
                    "horizon_step": steps,
                    "component": np.tile(np.array(layout.components, dtype=object), n_steps),
                    "value": matrix.reshape(-1),
                    "realized_flag": steps <= layout.realized_steps,
                }
            )
        )
    if not frames:
        return pd.DataFrame(columns=CSV_COLUMNS)
    frame = pd.concat(frames, ignore_index=True)[CSV_COLUMNS]
    if not include_lookahead:
        frame = frame[frame["realized_flag"]].reset_index(drop=True)
    return frame


def export_csv(
    store: ResultStore, key: ResultKey, path: Union[str, Path], include_lookahead: bool = False
) -> Path:
    """Write ``key`` as CSV, realized rows only unless ``include_lookahead``.

    Values keep full float64 precision.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = result_frame(store, key, include_lookahead)
    frame["execution_time"] = pd.to_datetime(frame["execution_time"]).dt.strftime("%Y-%m-%dT%H:%M:%S")
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
