"""Static power system component data models.

Power quantities are stored per-unit on the system base (see
``src.system.units``); costs stay in $/MWh, $/h and $. Durations are hours.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class BusType(str, Enum):
    SLACK = "slack"
    PQ = "pq"
    PV = "pv"


@dataclass(frozen=True)
class Bus:
    """Network node.

    Attributes:
        name: Identifier, unique system-wide.
        base_voltage: Nominal voltage in kV (informational only).
        bus_type: Slack, PQ or PV. Exactly one slack bus per system.
    """

    name: str
    base_voltage: float
    bus_type: BusType


@dataclass(frozen=True)
class Line:
    """Branch between two buses, DC model only.

    Attributes:
        name: Identifier.
        from_bus: Name of the sending bus.
        to_bus: Name of the receiving bus.
        reactance: Series reactance in per-unit (> 0).
        rating: Thermal limit in per-unit on the system base.
    """

    name: str
    from_bus: str
    to_bus: str
    reactance: float
    rating: float


@dataclass(frozen=True)
class ThermalGen:
    """Dispatchable thermal unit.

    Attributes:
        name: Identifier.
        bus: Name of the connection bus.
        p_min: Minimum stable output when committed (p.u.).
        p_max: Maximum output (p.u.).
        ramp_up: Ramp-up limit (p.u./h).
        ramp_down: Ramp-down limit (p.u./h).
        min_up: Minimum up time (h).
        min_down: Minimum down time (h).
        variable_cost: Linear energy cost ($/MWh); ignored when ``cost_curve``
            is set.
        cost_curve: Convex piecewise linear cost as ``(MW, $/h)`` points.
        no_load_cost: Cost of being committed ($/h).
        startup_cost: Cost per start ($).
        initial_on: Commitment status before the first step, or None.
        initial_power: Output before the first step (p.u.), or None.
        initial_duration: Hours already spent in ``initial_on`` status, or None.
        available: Unavailable units are skipped by the builders.
    """

    name: str
    bus: str
    p_min: float
    p_max: float
    ramp_up: float
    ramp_down: float
    min_up: int
    min_down: int
    variable_cost: float = 0.0
    cost_curve: tuple[tuple[float, float], ...] = ()
    no_load_cost: float = 0.0
    startup_cost: float = 0.0
    initial_on: bool | None = None
    initial_power: float | None = None
    initial_duration: float | None = None
    available: bool = True

    @property
    def has_initial_conditions(self) -> bool:
        return (
            self.initial_on is not None
            and self.initial_power is not None
            and self.initial_duration is not None
        )


@dataclass(frozen=True)
class RenewableGen:
    """Variable renewable plant; its forecast is per-unit of ``rating``."""

    name: str
    bus: str
    rating: float
    curtailment_cost: float = 0.0
    available: bool = True


@dataclass(frozen=True)
class Load:
    """Fixed withdrawal; its time series is per-unit of ``peak``."""

    name: str
    bus: str
    peak: float
    available: bool = True


@dataclass(frozen=True)
class Storage:
    """Energy storage device.

    Attributes:
        energy_capacity: Maximum state of charge (p.u.·h).
        charge_max: Charging power limit (p.u.).
        discharge_max: Discharging power limit (p.u.).
        charge_efficiency: Fraction of charged energy stored, in (0, 1].
        discharge_efficiency: Fraction of withdrawn energy delivered, in (0, 1].
        initial_soc: State of charge before the first step (p.u.·h), or None.
    """

    name: str
    bus: str
    energy_capacity: float
    charge_max: float
    discharge_max: float
    charge_efficiency: float = 1.0
    discharge_efficiency: float = 1.0
    initial_soc: float | None = None
    available: bool = True


@dataclass(frozen=True)
class ReserveProduct:
    """Upward reserve requirement met by thermal units and storage.

    The requirement series attached under ``(name, requirement_series)`` is
    per-unit of ``requirement``.
    """

    name: str
    direction: str
    contributing_devices: tuple[str, ...]
    requirement_series: str
    requirement: float
    available: bool = True


DEVICE_TYPES: dict[str, type] = {
    "ThermalGen": ThermalGen,
    "RenewableGen": RenewableGen,
    "Load": Load,
    "Storage": Storage,
}


@dataclass(frozen=True)
class InitialConditions:
    """Initial device state fed to the first execution of every model.

    Attributes:
        on_status: Thermal commitment status.
        power: Thermal output (p.u.).
        duration: Hours spent in the current status.
        soc: Storage state of charge (p.u.·h).
    """

    on_status: dict[str, bool] = field(default_factory=dict)
    power: dict[str, float] = field(default_factory=dict)
    duration: dict[str, float] = field(default_factory=dict)
    soc: dict[str, float] = field(default_factory=dict)
