"""ResultStore: layout registry, LRU read cache and the in-memory backend.

Backends implement ``_put``, ``_get`` and ``_finalize``; the base class owns
key validation, shape checks and the read cache.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable

import numpy as np

from .errors import LayoutFrozenError, StoreError, UnknownResultError
from .keys import ResultKey, ResultLayout, StoreConfig

logger = logging.getLogger(__name__)

EntryKey = tuple[ResultKey, datetime]


@dataclass
class StoreStats:
    """Counters of one store session."""

    writes: int = 0
    flushes: int = 0
    write_sizes: list[int] = field(default_factory=list)
    hits: int = 0
    misses: int = 0

    @property
    def bytes_written(self) -> int:
        return sum(self.write_sizes)


class ResultStore(ABC):
    """Hierarchical store of result matrices keyed by execution time."""

    def __init__(self, config: StoreConfig | None = None):
        self.config = config or StoreConfig()
        self.stats = StoreStats()
        self._layouts: dict[ResultKey, ResultLayout] = {}
        self._times: dict[ResultKey, list[datetime]] = {}
        self._cache: OrderedDict[EntryKey, np.ndarray] = OrderedDict()
        self._frozen = False
        self._closed = False

    # -------------
    # Layout
    # -------------

    def register_layout(self, layouts: Iterable[ResultLayout]) -> None:
        """Register result axes; re-registering identical layouts is a no-op.

        Raises:
            LayoutFrozenError: On a new or changed layout after the first write.
            StoreError: On a changed layout before the first write.
        """
        self._check_open()
        for layout in layouts:
            existing = self._layouts.get(layout.key)
            if existing == layout:
                continue
            if self._frozen:
                raise LayoutFrozenError(f"layout frozen: cannot register {layout.key.path} after the first write")
            if existing is not None:
                raise StoreError(f"axes of {layout.key.path} are already registered differently")
            self._layouts[layout.key] = layout
            self._times[layout.key] = []

    def keys(self) -> list[ResultKey]:
        return sorted(self._layouts)

    def layout(self, key: ResultKey) -> ResultLayout:
        try:
            return self._layouts[key]
        except KeyError:
            raise UnknownResultError(f"no result registered under {key.path}") from None

    def execution_times(self, key: ResultKey) -> list[datetime]:
        self.layout(key)
        return list(self._times[key])

    # -------------
    # Data
    # -------------

    def write_result(self, key: ResultKey, execution_time: datetime, matrix: np.ndarray) -> None:
        """Store one ``horizon × components`` matrix.

        Raises:
            StoreError: On a shape mismatch, a duplicate write or a closed store.
        """
        self._check_open()
        layout = self.layout(key)
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.shape != layout.shape:
            raise StoreError(f"shape {matrix.shape} does not match {layout.shape} registered for {key.path}")
        times = self._times[key]
        if times and execution_time <= times[-1]:
            raise StoreError(
                f"{key.path} already holds a result at or after {execution_time.isoformat()}"
            )
        self._frozen = True
        times.append(execution_time)
        self._put((key, execution_time), np.ascontiguousarray(matrix))
        self.stats.writes += 1

    def read_result(self, key: ResultKey, execution_time: datetime) -> np.ndarray:
        """Read a matrix back bit-exact, through the LRU cache.

        Raises:
            UnknownResultError: If nothing was written under the key and time.
        """
        entry = (key, execution_time)
        cached = self._cache.get(entry)
        if cached is not None:
            self._cache.move_to_end(entry)
            self.stats.hits += 1
            return cached
        self.stats.misses += 1
        self.layout(key)
        if execution_time not in self._times[key]:
            raise UnknownResultError(f"no result for {key.path} at {execution_time.isoformat()}")
        matrix = self._get(entry)
        matrix.setflags(write=False)
        if self.config.read_cache_entries:
            self._cache[entry] = matrix
            if len(self._cache) > self.config.read_cache_entries:
                self._cache.popitem(last=False)
        return matrix

    def close(self) -> None:
        """Flush everything; a second call does nothing."""
        if self._closed:
            return
        self._finalize()
        self._closed = True
        logger.debug(
            "Closed %s: %d writes, %d flushes, %d bytes",
            type(self).__name__,
            self.stats.writes,
            self.stats.flushes,
            self.stats.bytes_written,
        )

    @property
    def closed(self) -> bool:
        return self._closed

    def _check_open(self) -> None:
        if self._closed:
            raise StoreError("store is closed")

    def __enter__(self) -> "ResultStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -------------
    # Backend hooks
    # -------------

    @abstractmethod
    def _put(self, entry: EntryKey, matrix: np.ndarray) -> None: ...

    @abstractmethod
    def _get(self, entry: EntryKey) -> np.ndarray: ...

    @abstractmethod
    def _finalize(self) -> None: ...


class MemoryStore(ResultStore):
    """Keeps every matrix in memory; nothing survives the process."""

    def __init__(self, config: StoreConfig | None = None):
        super().__init__(config)
        self._data: dict[EntryKey, np.ndarray] = {}

    def _put(self, entry: EntryKey, matrix: np.ndarray) -> None:
        self._data[entry] = matrix.copy()

    def _get(self, entry: EntryKey) -> np.ndarray:
        return self._data[entry].copy()

    def _finalize(self) -> None:
        pass
