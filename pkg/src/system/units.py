"""Per-unit conversion helpers.

Power and energy quantities are kept per-unit on the system base inside the
engine; costs stay in natural units.
"""

from __future__ import annotations

from datetime import timedelta


def to_per_unit(value_mw: float, base_power: float) -> float:
    """Convert MW (or MWh, MW/h) to per-unit on ``base_power``."""
    return value_mw / base_power


def to_natural_units(value_pu: float, base_power: float) -> float:
    """Convert per-unit back to MW (or MWh, MW/h)."""
    return value_pu * base_power


def hours(duration: timedelta) -> float:
    return duration.total_seconds() / 3600.0
