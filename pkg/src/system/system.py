"""SystemModel: the static grid plus its time-series registry."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .components import (
    Bus,
    BusType,
    Line,
    Load,
    RenewableGen,
    ReserveProduct,
    Storage,
    ThermalGen,
)
from .timeseries import TimeSeriesRegistry


@dataclass
class SystemModel:
    """Container of all components of one power system.

    Components are keyed by name and kept in descriptor order. The model is
    treated as immutable once ``load_system`` returns; only the forecast read
    cache inside ``time_series`` mutates.
    """

    base_power: float
    name: str = ""
    buses: dict[str, Bus] = field(default_factory=dict)
    lines: dict[str, Line] = field(default_factory=dict)
    thermal_gens: dict[str, ThermalGen] = field(default_factory=dict)
    renewable_gens: dict[str, RenewableGen] = field(default_factory=dict)
    loads: dict[str, Load] = field(default_factory=dict)
    storage: dict[str, Storage] = field(default_factory=dict)
    reserves: dict[str, ReserveProduct] = field(default_factory=dict)
    time_series: TimeSeriesRegistry = field(default_factory=TimeSeriesRegistry)

    def components_of_type(self, type_name: str) -> list:
        """Return available components of a device type name, e.g. ``"Load"``."""
        collection = {
            "ThermalGen": self.thermal_gens,
            "RenewableGen": self.renewable_gens,
            "Load": self.loads,
            "Storage": self.storage,
        }.get(type_name)
        if collection is None:
            raise KeyError(f"Unknown device type '{type_name}'")
        return [c for c in collection.values() if c.available]

    def component_types_present(self) -> list[str]:
        return [
            t
            for t in ("ThermalGen", "RenewableGen", "Load", "Storage")
            if self.components_of_type(t)
        ]

    def get_component(self, name: str):
        for collection in (
            self.buses,
            self.lines,
            self.thermal_gens,
            self.renewable_gens,
            self.loads,
            self.storage,
            self.reserves,
        ):
            if name in collection:
                return collection[name]
        raise KeyError(f"Component '{name}' not found")

    def component_type(self, name: str) -> str:
        return type(self.get_component(name)).__name__

    @property
    def slack_bus(self) -> Bus:
        return next(b for b in self.buses.values() if b.bus_type is BusType.SLACK)

    @property
    def has_complete_initial_conditions(self) -> bool:
        return all(
            g.has_initial_conditions for g in self.thermal_gens.values() if g.available
        ) and all(s.initial_soc is not None for s in self.storage.values() if s.available)


def get_forecast_window(
    sys: SystemModel,
    component: str,
    label: str,
    issue_time: datetime,
    horizon_steps: int,
) -> np.ndarray:
    """Return the first ``horizon_steps`` forecast values issued at ``issue_time``.

    Raises:
        ForecastNotFoundError: Nothing registered for ``(component, label)``.
        IssueTimeNotFoundError: ``issue_time`` is not a stored issue time.
        HorizonOverrunError: ``horizon_steps`` exceeds the stored horizon.
    """
    return sys.time_series.forecast_window(component, label, issue_time, horizon_steps)


def get_realization(
    sys: SystemModel, component: str, label: str, at: datetime
) -> float:
    """Return the realized value at ``at`` (exact grid point, no interpolation)."""
    return sys.time_series.realization(component, label, at)
