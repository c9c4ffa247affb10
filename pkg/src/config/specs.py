"""Typed view of a validated simulation config document."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any

import pandas as pd

from .documents import parse_duration
from .schema import SchemaError


def to_timedelta(value: Any, where: str) -> timedelta:
    return parse_duration(value, where).to_pytimedelta()


def duration_text(value: timedelta) -> str:
    """Canonical duration string, parsed back unchanged by ``pandas.Timedelta``."""
    seconds = int(value.total_seconds())
    if seconds % 3600 == 0:
        return f"{seconds // 3600}h"
    if seconds % 60 == 0:
        return f"{seconds // 60}min"
    return f"{seconds}s"


def to_datetime(value: Any, where: str) -> datetime:
    try:
        stamp = pd.Timestamp(str(value))
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{where}: invalid timestamp {value!r}") from exc
    if stamp.tzinfo is not None:
        raise SchemaError(f"{where}: timestamps must be naive, got {value!r}")
    return stamp.to_pydatetime()


@dataclass(frozen=True)
class ModelConfig:
    """One decision model entry."""

    name: str
    template: dict[str, Any]
    horizon: int
    resolution: timedelta
    interval: timedelta
    chronology: str | None = None
    solver: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class EmulatorConfig:
    name: str
    template: dict[str, Any]
    resolution: timedelta
    solver: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SimulationConfig:
    """Everything needed to build and run one simulation.

    Attributes:
        system_path: Absolute path of the system descriptor.
        models: Decision models, outermost first.
        emulator: Emulation model, or None.
        feedforwards: Raw feedforward entries.
        chronology: Default initial-condition chronology.
        start: First simulated instant.
        steps: Number of simulation steps (outermost intervals).
        store: Store settings.
        output_dir: Absolute output directory.
        on_infeasible: ``"halt"`` or ``"skip_and_carry"``.
    """

    system_path: Path
    models: list[ModelConfig]
    emulator: EmulatorConfig | None
    feedforwards: list[dict[str, Any]]
    chronology: str
    start: datetime
    steps: int
    store: dict[str, Any]
    output_dir: Path
    on_infeasible: str = "halt"

    @property
    def model_names(self) -> list[str]:
        names = [m.name for m in self.models]
        return names + ([self.emulator.name] if self.emulator else [])
