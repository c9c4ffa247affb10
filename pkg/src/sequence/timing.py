"""Time arithmetic shared by models, the sequence and the state."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from functools import reduce

from .errors import TimingError


def format_duration(value: timedelta) -> str:
    """``24h``, ``15min``, ``90s`` style text for messages and metadata."""
    seconds = int(value.total_seconds())
    if seconds % 3600 == 0:
        return f"{seconds // 3600}h"
    if seconds % 60 == 0:
        return f"{seconds // 60}min"
    return f"{seconds}s"


def divides(part: timedelta, whole: timedelta) -> bool:
    return part > timedelta(0) and whole % part == timedelta(0)


def check_model_timing(name: str, horizon_steps: int, resolution: timedelta, interval: timedelta) -> None:
    """A model must cover its own interval on its resolution grid.

    Raises:
        TimingError: Naming the model and the violated rule.
    """
    if horizon_steps <= 0:
        raise TimingError(f"model '{name}': horizon must be a positive number of steps")
    if resolution <= timedelta(0) or interval <= timedelta(0):
        raise TimingError(f"model '{name}': resolution and interval must be positive")
    if not divides(resolution, interval):
        raise TimingError(
            f"model '{name}': interval not multiple of resolution "
            f"({format_duration(interval)} vs {format_duration(resolution)})"
        )
    if horizon_steps * resolution < interval:
        raise TimingError(
            f"model '{name}': horizon shorter than interval "
            f"({format_duration(horizon_steps * resolution)} < {format_duration(interval)})"
        )


def grid_resolution(durations: list[timedelta]) -> timedelta:
    """Coarsest grid on which every duration is a whole number of steps."""
    seconds = [int(d.total_seconds()) for d in durations]
    return timedelta(seconds=reduce(math.gcd, seconds))


@dataclass(frozen=True)
class SimulationSpan:
    """``steps`` consecutive outermost intervals starting at ``start``."""

    start: datetime
    steps: int
    step_length: timedelta

    @property
    def end(self) -> datetime:
        return self.start + self.steps * self.step_length

    def step_start(self, step: int) -> datetime:
        """Start of 1-based simulation step ``step``."""
        return self.start + (step - 1) * self.step_length
