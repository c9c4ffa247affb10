"""Renewable plants and fixed loads, both driven by forecast parameters."""

from __future__ import annotations

from src.optimization.container import LinearConstraint, OptimizationContainer, Sense
from src.optimization.keys import ParameterKind, ParamKey, VariableKind, VarKey, constraint_name
from src.system.components import InitialConditions, Load, RenewableGen
from src.system.system import SystemModel

from .base import BuildContext, DeviceFormulation, balance_key
from .template import ProblemTemplate

# Time-series label that feeds ForecastBound parameters.
MAX_ACTIVE_POWER = "max_active_power"


def forecast_key(component: str, t: int) -> ParamKey:
    return ParamKey(ParameterKind.FORECAST_BOUND, component, t)


class RenewableFullDispatch(DeviceFormulation):
    """``0 ≤ p ≤ forecast·rating`` with a penalty on curtailed energy."""

    name = "RenewableFullDispatch"
    device_type = "RenewableGen"

    def add_arguments(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for gen in self.devices:
            for t in ctx.steps:
                p = VarKey(VariableKind.ACTIVE_POWER, gen.name, t)
                container.add_variable(p, 0.0, gen.rating)
                container.add_parameter(forecast_key(gen.name, t))
                container.add_to_expression(balance_key(gen.bus, t), p, 1.0)

    def add_constraints(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for gen in self.devices:
            for t in ctx.steps:
                container.add_constraint(
                    LinearConstraint(
                        constraint_name("RenewableLimit", gen.name, t),
                        [(VarKey(VariableKind.ACTIVE_POWER, gen.name, t), 1.0)],
                        Sense.LE,
                        0.0,
                        {forecast_key(gen.name, t): gen.rating},
                    )
                )

    def add_objective(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for gen in self.devices:
            if not gen.curtailment_cost:
                continue
            weight = gen.curtailment_cost * ctx.energy_scale
            for t in ctx.steps:
                container.add_objective_parameter_constant(forecast_key(gen.name, t), weight * gen.rating)
                container.add_objective_term(VarKey(VariableKind.ACTIVE_POWER, gen.name, t), -weight)


class StaticPowerLoad(DeviceFormulation):
    """Withdrawal of ``forecast·peak`` from the load's bus."""

    name = "StaticPowerLoad"
    device_type = "Load"

    def add_arguments(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for load in self.devices:
            for t in ctx.steps:
                key = forecast_key(load.name, t)
                container.add_parameter(key)
                container.add_parameter_to_expression(balance_key(load.bus, t), key, -load.peak)


def _context(horizon: int, base_power: float, dt: float = 1.0) -> BuildContext:
    return BuildContext(SystemModel(base_power=base_power), ProblemTemplate(), horizon, dt, InitialConditions())


def build_renewable(
    container: OptimizationContainer,
    gens: list[RenewableGen],
    horizon: int,
    *,
    dt: float = 1.0,
    base_power: float = 100.0,
) -> None:
    RenewableFullDispatch(gens).build(container, _context(horizon, base_power, dt))


def build_load(container: OptimizationContainer, loads: list[Load], horizon: int) -> None:
    StaticPowerLoad(loads).build(container, _context(horizon, 100.0))
