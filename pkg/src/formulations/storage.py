"""Storage dispatch with state-of-charge dynamics."""

from __future__ import annotations

from src.optimization.container import LinearConstraint, OptimizationContainer, Sense
from src.optimization.keys import ParameterKind, ParamKey, VariableKind, VarKey, constraint_name
from src.system.components import InitialConditions, Storage
from src.system.system import SystemModel

from .base import BuildContext, DeviceFormulation, balance_key
from .initial import require_storage_state
from .template import ProblemTemplate

P_IN = VariableKind.POWER_IN
P_OUT = VariableKind.POWER_OUT
SOC = VariableKind.SOC


class StorageBasicDispatch(DeviceFormulation):
    """``SoC_τ = SoC_{τ−1} + (η_c·p_in − p_out/η_d)·Δt`` within capacity.

    Charging and discharging in the same step is not excluded; with
    efficiencies below one it is never optimal.
    """

    name = "StorageBasicDispatch"
    device_type = "Storage"

    def add_arguments(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for unit in self.devices:
            require_storage_state(unit, ctx.initial_conditions)
            container.add_parameter(
                ParamKey(ParameterKind.INITIAL_SOC, unit.name, 0),
                ctx.initial_conditions.soc[unit.name],
            )
            for t in ctx.steps:
                p_in, p_out = VarKey(P_IN, unit.name, t), VarKey(P_OUT, unit.name, t)
                container.add_variable(p_in, 0.0, unit.charge_max)
                container.add_variable(p_out, 0.0, unit.discharge_max)
                container.add_variable(VarKey(SOC, unit.name, t), 0.0, unit.energy_capacity)
                container.add_to_expression(balance_key(unit.bus, t), p_out, 1.0)
                container.add_to_expression(balance_key(unit.bus, t), p_in, -1.0)

    def add_constraints(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for unit in self.devices:
            initial = ParamKey(ParameterKind.INITIAL_SOC, unit.name, 0)
            for t in ctx.steps:
                terms = [
                    (VarKey(SOC, unit.name, t), 1.0),
                    (VarKey(P_IN, unit.name, t), -unit.charge_efficiency * ctx.dt),
                    (VarKey(P_OUT, unit.name, t), ctx.dt / unit.discharge_efficiency),
                ]
                params = {initial: 1.0} if t == 1 else {}
                if t > 1:
                    terms.append((VarKey(SOC, unit.name, t - 1), -1.0))
                container.add_constraint(
                    LinearConstraint(
                        constraint_name("StorageEnergyBalance", unit.name, t), terms, Sense.EQ, 0.0, params
                    )
                )


def build_storage(
    container: OptimizationContainer,
    units: list[Storage],
    horizon: int,
    dt: float,
    initial_conditions: InitialConditions,
    *,
    base_power: float = 100.0,
) -> None:
    """Raises ``BuildError`` when a unit has no initial state of charge."""
    ctx = BuildContext(SystemModel(base_power=base_power), ProblemTemplate(), horizon, dt, initial_conditions)
    StorageBasicDispatch(units).build(container, ctx)
