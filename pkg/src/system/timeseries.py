"""Forecast windows and realization series attached to system components."""

from __future__ import annotations

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from .errors import (
    ForecastNotFoundError,
    HorizonOverrunError,
    IssueTimeNotFoundError,
    OffGridError,
    OutOfRangeError,
    RealizationNotFoundError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Forecast:
    """Deterministic look-ahead data keyed by issue time.

    Attributes:
        component: Name of the component the forecast belongs to.
        label: Quantity forecast, e.g. ``"max_active_power"``.
        resolution: Spacing between the values of one window.
        issue_interval: Spacing between consecutive issue times.
        horizon_steps: Number of values in every window.
        windows: Issue time to read-only vector of ``horizon_steps`` values.
    """

    component: str
    label: str
    resolution: timedelta
    issue_interval: timedelta
    horizon_steps: int
    windows: dict[datetime, np.ndarray]

    @property
    def issue_times(self) -> list[datetime]:
        return sorted(self.windows)

    @property
    def first_issue(self) -> datetime:
        return min(self.windows)

    @property
    def last_issue(self) -> datetime:
        return max(self.windows)


@dataclass(frozen=True)
class RealizationSeries:
    """Single-timeline actuals for one component quantity."""

    component: str
    label: str
    resolution: timedelta
    start: datetime
    values: np.ndarray

    @property
    def end(self) -> datetime:
        """Timestamp of the last stored value."""
        return self.start + self.resolution * (len(self.values) - 1)

    def covers(self, start: datetime, end: datetime) -> bool:
        """True when every grid point in ``[start, end)`` has a value."""
        return self.start <= start and end - self.resolution <= self.end


@dataclass
class CacheStats:
    reads: int = 0
    hits: int = 0
    misses: int = 0
    realization_reads: int = 0


class TimeSeriesRegistry:
    """Holds every forecast and realization of a system plus a window cache.

    Window reads go through an LRU cache keyed by
    ``(component, label, issue_time, horizon_steps)``; ``stats`` exposes the
    read, hit and miss counters.
    """

    def __init__(self, cache_entries: int = 1024):
        self._forecasts: dict[tuple[str, str], Forecast] = {}
        self._realizations: dict[tuple[str, str], RealizationSeries] = {}
        self._cache: OrderedDict[tuple, np.ndarray] = OrderedDict()
        self._cache_entries = cache_entries
        self.stats = CacheStats()

    def add_forecast(self, forecast: Forecast) -> None:
        self._forecasts[(forecast.component, forecast.label)] = forecast

    def add_realization(self, series: RealizationSeries) -> None:
        self._realizations[(series.component, series.label)] = series

    @property
    def forecasts(self) -> dict[tuple[str, str], Forecast]:
        return dict(self._forecasts)

    @property
    def realizations(self) -> dict[tuple[str, str], RealizationSeries]:
        return dict(self._realizations)

    def has_forecast(self, component: str, label: str) -> bool:
        return (component, label) in self._forecasts

    def has_realization(self, component: str, label: str) -> bool:
        return (component, label) in self._realizations

    def get_forecast(self, component: str, label: str) -> Forecast:
        try:
            return self._forecasts[(component, label)]
        except KeyError:
            raise ForecastNotFoundError(
                f"No forecast registered for component '{component}' label '{label}'"
            ) from None

    def get_realization_series(self, component: str, label: str) -> RealizationSeries:
        try:
            return self._realizations[(component, label)]
        except KeyError:
            raise RealizationNotFoundError(
                f"No realization series registered for component '{component}' "
                f"label '{label}'"
            ) from None

    def forecast_window(
        self, component: str, label: str, issue_time: datetime, horizon_steps: int
    ) -> np.ndarray:
        """Return the first ``horizon_steps`` values issued at ``issue_time``."""
        self.stats.reads += 1
        key = (component, label, issue_time, horizon_steps)
        cached = self._cache.get(key)
        if cached is not None:
            self._cache.move_to_end(key)
            self.stats.hits += 1
            return cached

        self.stats.misses += 1
        forecast = self.get_forecast(component, label)
        window = forecast.windows.get(issue_time)
        if window is None:
            raise IssueTimeNotFoundError(
                f"Forecast '{component}/{label}' has no window issued at "
                f"{issue_time.isoformat()}"
            )
        if horizon_steps > forecast.horizon_steps:
            raise HorizonOverrunError(
                f"Requested {horizon_steps} steps from forecast '{component}/{label}' "
                f"which stores {forecast.horizon_steps}"
            )
        values = window[:horizon_steps].copy()
        values.setflags(write=False)
        self._cache[key] = values
        if len(self._cache) > self._cache_entries:
            self._cache.popitem(last=False)
        return values

    def realization(self, component: str, label: str, at: datetime) -> float:
        """Return the exact stored actual at ``at``; no interpolation."""
        self.stats.realization_reads += 1
        series = self.get_realization_series(component, label)
        offset = at - series.start
        if offset < timedelta(0) or at > series.end:
            raise OutOfRangeError(
                f"Timestamp {at.isoformat()} outside realization '{component}/{label}' "
                f"[{series.start.isoformat()}, {series.end.isoformat()}]"
            )
        index, remainder = divmod(offset, series.resolution)
        if remainder:
            raise OffGridError(
                f"off-grid timestamp {at.isoformat()} for realization "
                f"'{component}/{label}' at resolution {series.resolution}"
            )
        return float(series.values[index])


@dataclass(frozen=True)
class TimeSeriesEntry:
    """One manifest entry of the system descriptor."""

    kind: str
    label: str
    path: str
    resolution: timedelta
    issue_interval: timedelta | None = None
    horizon_steps: int | None = None
    components: tuple[str, ...] = field(default_factory=tuple)
