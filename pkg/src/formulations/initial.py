"""Initial-condition parameters of thermal units and storage.

Initial conditions enter a container only through parameters, so a model built
once can start every execution from a different state.
"""

from __future__ import annotations

import math

from src.optimization.container import OptimizationContainer
from src.optimization.keys import ParameterKind, ParamKey
from src.system.components import InitialConditions, Storage, ThermalGen
from src.system.system import SystemModel

from .errors import BuildError

_EPS = 1e-9


def window_steps(duration_h: float, dt: float) -> int:
    """Steps covered by a minimum up/down time, at least one."""
    return max(1, math.ceil(duration_h / dt - _EPS))


def thermal_initial_values(
    gen: ThermalGen, on: bool, power: float, duration: float, horizon: int, dt: float
) -> dict[ParamKey, float]:
    """Parameter values encoding one unit's state before step 1.

    ``MinUpInitial(g, τ)`` is 1 while a unit that is on has not yet completed
    its minimum up time at the start of step τ; ``MinDownInitial(g, τ)`` is 0
    while a unit that is off has not completed its minimum down time.
    """
    values = {
        ParamKey(ParameterKind.INITIAL_ON_STATUS, gen.name, 0): 1.0 if on else 0.0,
        ParamKey(ParameterKind.INITIAL_POWER, gen.name, 0): float(power) if on else 0.0,
    }
    for t in range(1, min(horizon, window_steps(gen.min_up, dt)) + 1):
        elapsed = duration + (t - 1) * dt
        must_stay_on = on and elapsed < gen.min_up - _EPS
        values[ParamKey(ParameterKind.MIN_UP_INITIAL, gen.name, t)] = float(must_stay_on)
    for t in range(1, min(horizon, window_steps(gen.min_down, dt)) + 1):
        elapsed = duration + (t - 1) * dt
        must_stay_off = (not on) and elapsed < gen.min_down - _EPS
        values[ParamKey(ParameterKind.MIN_DOWN_INITIAL, gen.name, t)] = 0.0 if must_stay_off else 1.0
    return values


def initial_condition_values(
    system: SystemModel, ic: InitialConditions, horizon: int, dt: float
) -> dict[ParamKey, float]:
    """Initial-condition parameter values for every available device."""
    values: dict[ParamKey, float] = {}
    for gen in system.components_of_type("ThermalGen"):
        require_thermal_state(gen, ic)
        values.update(
            thermal_initial_values(
                gen, ic.on_status[gen.name], ic.power[gen.name], ic.duration[gen.name], horizon, dt
            )
        )
    for unit in system.components_of_type("Storage"):
        require_storage_state(unit, ic)
        values[ParamKey(ParameterKind.INITIAL_SOC, unit.name, 0)] = float(ic.soc[unit.name])
    return values


def apply_initial_conditions(
    container: OptimizationContainer,
    system: SystemModel,
    ic: InitialConditions,
    horizon: int,
    dt: float,
) -> int:
    """Write initial-condition parameters present in ``container``; returns the count."""
    updated = 0
    for key, value in initial_condition_values(system, ic, horizon, dt).items():
        if container.has_parameter(key):
            container.update_parameter(key, value)
            updated += 1
    return updated


def require_thermal_state(gen: ThermalGen, ic: InitialConditions) -> None:
    missing = [
        field
        for field, mapping in (("on_status", ic.on_status), ("power", ic.power), ("duration", ic.duration))
        if gen.name not in mapping
    ]
    if missing:
        raise BuildError(
            f"missing initial condition for thermal unit '{gen.name}': {', '.join(missing)}"
        )


def require_storage_state(unit: Storage, ic: InitialConditions) -> None:
    if unit.name not in ic.soc:
        raise BuildError(f"missing initial condition for storage '{unit.name}': soc")


def descriptor_initial_conditions(system: SystemModel) -> InitialConditions:
    """Initial conditions given in the system descriptor; may be incomplete."""
    ic = InitialConditions()
    for gen in system.thermal_gens.values():
        if gen.has_initial_conditions:
            ic.on_status[gen.name] = bool(gen.initial_on)
            ic.power[gen.name] = float(gen.initial_power)
            ic.duration[gen.name] = float(gen.initial_duration)
    for unit in system.storage.values():
        if unit.initial_soc is not None:
            ic.soc[unit.name] = float(unit.initial_soc)
    return ic


def placeholder_initial_conditions(system: SystemModel) -> InitialConditions:
    """Unconstraining stand-in state for the relaxed initialization solve.

    Units are off for longer than any minimum time, so no start is blocked;
    storage sits at half capacity unless the descriptor gives a value.
    """
    ic = descriptor_initial_conditions(system)
    for gen in system.thermal_gens.values():
        if gen.name not in ic.on_status:
            ic.on_status[gen.name] = False
            ic.power[gen.name] = 0.0
            ic.duration[gen.name] = float(max(gen.min_up, gen.min_down))
    for unit in system.storage.values():
        ic.soc.setdefault(unit.name, 0.5 * unit.energy_capacity)
    return ic
