"""Single-file results store with batched writes.

File layout::

    header  | MAGIC (8 bytes)
    chunks  | one zlib stream (or raw bytes) per matrix, little-endian float64
    index   | JSON directory: layouts, entry offsets and lengths
    footer  | index offset (u64) | index length (u64) | END_MAGIC (8 bytes)

Chunks are buffered and written in one call once ``write_batch_min`` bytes
are pending; the remainder, the index and the footer go out in a single
final write on close. The index makes the file self-describing.
"""

from __future__ import annotations

import json
import logging
import struct
import zlib
from datetime import datetime
from pathlib import Path
from typing import Any, BinaryIO, Union

import numpy as np

from .base import EntryKey, ResultStore
from .errors import StoreError
from .keys import FILE, ResultKey, ResultLayout, StoreConfig

logger = logging.getLogger(__name__)

MAGIC = b"OPSIMRS1"
END_MAGIC = b"OPSIMEND"
FORMAT_VERSION = 1
_FOOTER = struct.Struct("<QQ8s")
_DTYPE = np.dtype("<f8")


class FileStore(ResultStore):
    """Writer (``mode="w"``) or reader (``mode="r"``) of one store file."""

    def __init__(self, path: Union[str, Path], config: StoreConfig | None = None, mode: str = "w"):
        super().__init__(config or StoreConfig(backend=FILE))
        if mode not in ("w", "r"):
            raise StoreError(f"unknown store mode '{mode}'")
        self.path = Path(path)
        self.mode = mode
        self._handle: BinaryIO | None = None
        self._offset = 0
        self._pending: list[bytes] = []
        self._pending_bytes = 0
        self._buffered: dict[EntryKey, np.ndarray] = {}
        self._index: dict[EntryKey, dict[str, Any]] = {}
        if mode == "r":
            self._read_index()

    @property
    def buffered_bytes(self) -> int:
        return self._pending_bytes

    def _check_open(self) -> None:
        if self.mode == "r":
            raise StoreError(f"{self.path} is open read-only")
        super()._check_open()

    # -------------
    # Writing
    # -------------

    def _put(self, entry: EntryKey, matrix: np.ndarray) -> None:
        raw = matrix.astype(_DTYPE, copy=False).tobytes()
        chunk = zlib.compress(raw, 6) if self.config.compress else raw
        start = len(MAGIC) + self._offset + self._pending_bytes
        self._index[entry] = {
            "offset": start,
            "length": len(chunk),
            "compressed": self.config.compress,
            "shape": list(matrix.shape),
        }
        self._pending.append(chunk)
        self._pending_bytes += len(chunk)
        self._buffered[entry] = matrix.copy()
        if self._pending_bytes >= self.config.write_batch_min:
            self._flush()

    def _write(self, blob: bytes) -> None:
        if self._handle is None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = open(self.path, "wb")
            blob = MAGIC + blob
        self._handle.write(blob)
        self._handle.flush()
        self.stats.flushes += 1
        self.stats.write_sizes.append(len(blob))

    def _flush(self) -> None:
        blob = b"".join(self._pending)
        self._write(blob)
        self._offset += len(blob)
        self._pending.clear()
        self._pending_bytes = 0
        self._buffered.clear()
        logger.debug("Flushed %d bytes to %s", len(blob), self.path)

    def _directory(self) -> bytes:
        entries: dict[str, dict[str, Any]] = {}
        for (key, at), record in self._index.items():
            entries.setdefault(key.path, {})[at.isoformat()] = record
        document = {
            "format": "opsim-results",
            "version": FORMAT_VERSION,
            "layouts": {key.path: layout.to_mapping() for key, layout in sorted(self._layouts.items())},
            "entries": entries,
        }
        return json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")

    def _finalize(self) -> None:
        if self.mode == "r":
            return
        body = b"".join(self._pending)
        directory = self._directory()
        index_offset = len(MAGIC) + self._offset + len(body)
        footer = _FOOTER.pack(index_offset, len(directory), END_MAGIC)
        self._write(body + directory + footer)
        self._handle.close()
        self._handle = None
        self._pending.clear()
        self._pending_bytes = 0
        self._buffered.clear()
        logger.info(
            "Results store %s closed: %d matrices, %d writes, %d bytes",
            self.path,
            len(self._index),
            self.stats.flushes,
            self.stats.bytes_written,
        )

    # -------------
    # Reading
    # -------------

    def _get(self, entry: EntryKey) -> np.ndarray:
        buffered = self._buffered.get(entry)
        if buffered is not None:
            return buffered.copy()
        record = self._index[entry]
        with open(self.path, "rb") as handle:
            handle.seek(record["offset"])
            chunk = handle.read(record["length"])
        raw = zlib.decompress(chunk) if record["compressed"] else chunk
        return np.frombuffer(raw, dtype=_DTYPE).reshape(record["shape"]).copy()

    def _read_index(self) -> None:
        try:
            with open(self.path, "rb") as handle:
                if handle.read(len(MAGIC)) != MAGIC:
                    raise StoreError(f"{self.path} is not an opsim results store")
                handle.seek(-_FOOTER.size, 2)
                index_offset, index_length, end = _FOOTER.unpack(handle.read(_FOOTER.size))
                if end != END_MAGIC:
                    raise StoreError(f"{self.path} was not closed cleanly (missing footer)")
                handle.seek(index_offset)
                document = json.loads(handle.read(index_length).decode("utf-8"))
        except OSError as e:
            raise StoreError(f"cannot read results store {self.path}: {e}") from e
        if document.get("version") != FORMAT_VERSION:
            raise StoreError(f"unsupported results store version {document.get('version')}")
        for path, data in document["layouts"].items():
            layout = ResultLayout.from_mapping(path, data)
            self._layouts[layout.key] = layout
            self._times[layout.key] = []
        for path, records in document["entries"].items():
            key = ResultKey.from_path(path)
            for stamp, record in sorted(records.items()):
                at = datetime.fromisoformat(stamp)
                self._times[key].append(at)
                self._index[(key, at)] = record
        self._frozen = True


def open_store(path: Union[str, Path], config: StoreConfig | None = None) -> FileStore:
    """Reopen a closed store file for reading."""
    return FileStore(path, config, mode="r")
