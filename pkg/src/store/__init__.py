"""
Store Module

Results persistence: an in-memory backend and a single-file backend with
batched writes, zlib chunks, a self-describing index and an LRU read cache.
"""

from src.store.base import MemoryStore, ResultStore, StoreStats
from src.store.errors import LayoutFrozenError, StoreConfigError, StoreError, UnknownResultError
from src.store.export import CSV_COLUMNS, STORE_FILE, export_csv, make_store, result_frame
from src.store.file import FileStore, open_store
from src.store.keys import (
    AUXILIARY,
    DUAL,
    FILE,
    MEMORY,
    PARAMETER,
    VARIABLE,
    ResultKey,
    ResultLayout,
    StoreConfig,
)

__all__ = [
    "AUXILIARY",
    "CSV_COLUMNS",
    "DUAL",
    "FILE",
    "FileStore",
    "LayoutFrozenError",
    "MEMORY",
    "MemoryStore",
    "PARAMETER",
    "ResultKey",
    "ResultLayout",
    "ResultStore",
    "STORE_FILE",
    "StoreConfig",
    "StoreConfigError",
    "StoreError",
    "StoreStats",
    "UnknownResultError",
    "VARIABLE",
    "export_csv",
    "make_store",
    "open_store",
    "result_frame",
]
