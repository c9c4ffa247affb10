"""Read access to the results of a simulation."""

from __future__ import annotations

from datetime import datetime, timedelta
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from src.store.base import ResultStore
from src.store.export import STORE_FILE, export_csv, result_frame
from src.store.file import open_store
from src.store.keys import VARIABLE, ResultKey

from .errors import SimulationError


class SimulationResults:
    """Results of one simulation, backed by its store.

    Args:
        store: Open or closed store holding the results.
        output_dir: Output directory of the simulation, when known.
    """

    def __init__(self, store: ResultStore, output_dir: Union[str, Path, None] = None):
        self.store = store
        self.output_dir = Path(output_dir) if output_dir is not None else None

    def keys(self) -> list[ResultKey]:
        return self.store.keys()

    def models(self) -> list[str]:
        return sorted({k.model for k in self.keys()})

    def execution_times(self, model: str, name: str, kind: str = VARIABLE) -> list[datetime]:
        return self.store.execution_times(ResultKey(model, kind, name))

    def read_result(self, model: str, kind: str, name: str, execution_time: datetime) -> np.ndarray:
        return self.store.read_result(ResultKey(model, kind, name), execution_time)

    def realized(self, model: str, name: str, kind: str = VARIABLE) -> pd.DataFrame:
        """Realized windows of every execution concatenated into one trajectory.

        Rows are timestamps, columns components.
        """
        key = ResultKey(model, kind, name)
        layout = self.store.layout(key)
        step = timedelta(seconds=layout.resolution)
        stamps: list[datetime] = []
        rows: list[np.ndarray] = []
        for at in self.store.execution_times(key):
            matrix = self.store.read_result(key, at)
            for i in range(layout.realized_steps):
                stamps.append(at + i * step)
                rows.append(matrix[i])
        values = np.vstack(rows) if rows else np.empty((0, len(layout.components)))
        return pd.DataFrame(
            values, index=pd.DatetimeIndex(stamps, name="timestamp"), columns=list(layout.components)
        )

    def lookahead(self, model: str, name: str, kind: str = VARIABLE) -> dict[datetime, pd.DataFrame]:
        """Full horizon of every execution, keyed by execution time."""
        key = ResultKey(model, kind, name)
        layout = self.store.layout(key)
        step = timedelta(seconds=layout.resolution)
        views = {}
        for at in self.store.execution_times(key):
            stamps = pd.DatetimeIndex([at + i * step for i in range(layout.horizon_steps)], name="timestamp")
            views[at] = pd.DataFrame(
                self.store.read_result(key, at), index=stamps, columns=list(layout.components)
            )
        return views

    def frame(self, model: str, name: str, kind: str = VARIABLE, include_lookahead: bool = True) -> pd.DataFrame:
        return result_frame(self.store, ResultKey(model, kind, name), include_lookahead)

    def export(
        self, model: str, name: str, path: Union[str, Path], kind: str = VARIABLE, include_lookahead: bool = False
    ) -> Path:
        return export_csv(self.store, ResultKey(model, kind, name), path, include_lookahead)

    def close(self) -> None:
        self.store.close()


def load_results(output_dir: Union[str, Path]) -> SimulationResults:
    """Reopen the results store of a finished (or failed) simulation read-only.

    Raises:
        SimulationError: If the directory or its store file is missing.
    """
    output_dir = Path(output_dir)
    if not output_dir.is_dir():
        raise SimulationError(f"no simulation output directory at {output_dir}")
    path = output_dir / STORE_FILE
    if not path.is_file():
        raise SimulationError(f"no results store at {path}; was the simulation run with the file backend?")
    return SimulationResults(open_store(path), output_dir)
