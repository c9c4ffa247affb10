"""Formulation catalog: names usable in a ProblemTemplate."""

from __future__ import annotations

from .base import DeviceFormulation
from .errors import BuildError
from .renewable import RenewableFullDispatch, StaticPowerLoad
from .reserves import RangeReserve
from .storage import StorageBasicDispatch
from .template import COPPER_PLATE, PTDF_DC_POWER
from .thermal import ThermalBasicDispatch, ThermalStandardUnitCommitment

DEVICE_FORMULATIONS: dict[str, type[DeviceFormulation]] = {
    cls.name: cls
    for cls in (
        ThermalStandardUnitCommitment,
        ThermalBasicDispatch,
        RenewableFullDispatch,
        StaticPowerLoad,
        StorageBasicDispatch,
    )
}
SERVICE_FORMULATIONS = {RangeReserve.name: RangeReserve}
NETWORK_FORMULATIONS = (COPPER_PLATE, PTDF_DC_POWER)


def device_formulation(component_type: str, name: str) -> type[DeviceFormulation]:
    """Look up a device formulation and check it models ``component_type``.

    Raises:
        BuildError: For unknown names or a formulation of another type.
    """
    cls = DEVICE_FORMULATIONS.get(name)
    if cls is None:
        raise BuildError(f"unknown device formulation '{name}' for {component_type}")
    if cls.device_type != component_type:
        raise BuildError(f"formulation '{name}' models {cls.device_type}, not {component_type}")
    return cls


def formulations_by_type() -> dict[str, tuple[str, ...]]:
    grouped: dict[str, list[str]] = {}
    for name, cls in DEVICE_FORMULATIONS.items():
        grouped.setdefault(cls.device_type, []).append(name)
    return {k: tuple(v) for k, v in grouped.items()}
