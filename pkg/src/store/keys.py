"""Result keys, their axes and store settings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .errors import StoreConfigError

MEMORY = "memory"
FILE = "file"
BACKENDS = (MEMORY, FILE)

VARIABLE = "variable"
PARAMETER = "parameter"
DUAL = "dual"
AUXILIARY = "auxiliary"
RESULT_KINDS = (VARIABLE, PARAMETER, DUAL, AUXILIARY)

MIN_WRITE_BATCH = 4 * 1024
DEFAULT_WRITE_BATCH = 1024 * 1024


@dataclass(frozen=True, order=True)
class ResultKey:
    """``model/kind/name`` node of the result hierarchy."""

    model: str
    kind: str
    name: str

    def __post_init__(self) -> None:
        if self.kind not in RESULT_KINDS:
            raise ValueError(f"unknown result kind '{self.kind}'")
        for part in (self.model, self.name):
            if not part or "/" in part:
                raise ValueError(f"invalid result key part '{part}'")

    @property
    def path(self) -> str:
        return f"{self.model}/{self.kind}/{self.name}"

    @classmethod
    def from_path(cls, path: str) -> "ResultKey":
        model, kind, name = path.split("/")
        return cls(model, kind, name)


@dataclass(frozen=True)
class ResultLayout:
    """Axes of one result: every stored matrix is ``horizon_steps × components``.

    Rows past ``realized_steps`` hold look-ahead values; ``resolution`` is the
    step length in seconds (0 when unknown).
    """

    key: ResultKey
    components: tuple[str, ...]
    horizon_steps: int
    realized_steps: int
    resolution: int = 0

    def __post_init__(self) -> None:
        if self.horizon_steps < 1 or not 1 <= self.realized_steps <= self.horizon_steps:
            raise ValueError(f"invalid step axes for {self.key.path}")
        if len(set(self.components)) != len(self.components):
            raise ValueError(f"duplicate components in {self.key.path}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.horizon_steps, len(self.components)

    def to_mapping(self) -> dict[str, Any]:
        return {
            "components": list(self.components),
            "horizon_steps": self.horizon_steps,
            "realized_steps": self.realized_steps,
            "resolution": self.resolution,
        }

    @classmethod
    def from_mapping(cls, path: str, data: dict[str, Any]) -> "ResultLayout":
        return cls(
            key=ResultKey.from_path(path),
            components=tuple(data["components"]),
            horizon_steps=int(data["horizon_steps"]),
            realized_steps=int(data["realized_steps"]),
            resolution=int(data.get("resolution", 0)),
        )


@dataclass(frozen=True)
class StoreConfig:
    """Store settings.

    Attributes:
        backend: ``"memory"`` or ``"file"``.
        write_batch_min: Bytes buffered before the file backend writes.
        read_cache_entries: Capacity of the LRU read cache.
        compress: zlib-compress each matrix in the file backend.
    """

    backend: str = FILE
    write_batch_min: int = DEFAULT_WRITE_BATCH
    read_cache_entries: int = 64
    compress: bool = True

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise StoreConfigError(f"unknown store backend '{self.backend}'; expected one of {BACKENDS}")
        if self.write_batch_min < MIN_WRITE_BATCH:
            raise StoreConfigError(
                f"write_batch_min must be at least {MIN_WRITE_BATCH} bytes, got {self.write_batch_min}"
            )
        if self.read_cache_entries < 0:
            raise StoreConfigError("read_cache_entries must not be negative")

    @classmethod
    def from_mapping(cls, data: dict | None) -> "StoreConfig":
        data = dict(data or {})
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        return cls(**known)

    def to_mapping(self) -> dict[str, Any]:
        return {
            "backend": self.backend,
            "write_batch_min": self.write_batch_min,
            "read_cache_entries": self.read_cache_entries,
            "compress": self.compress,
        }
