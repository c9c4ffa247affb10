"""Thermal unit formulations: standard unit commitment and basic dispatch."""

from __future__ import annotations

import logging

from src.optimization.container import INF, LinearConstraint, OptimizationContainer, Sense
from src.optimization.keys import ParameterKind, ParamKey, VariableKind, VarKey, constraint_name
from src.system.components import InitialConditions, ThermalGen
from src.system.system import SystemModel

from .base import BuildContext, DeviceFormulation, balance_key
from .initial import require_thermal_state, thermal_initial_values, window_steps
from .template import ProblemTemplate

logger = logging.getLogger(__name__)

P = VariableKind.ACTIVE_POWER
ON = VariableKind.ON_STATUS
START = VariableKind.START_UP
STOP = VariableKind.SHUT_DOWN
PWL = VariableKind.PWL_COST


def _terms(*pairs: tuple[VarKey, float]) -> list[tuple[VarKey, float]]:
    return [(key, coef) for key, coef in pairs if coef != 0.0]


def pwl_segments(gen: ThermalGen, base_power: float) -> list[tuple[float, float]]:
    """Cost curve segments as ``(slope $/h per p.u., intercept $/h)`` lines."""
    segments = []
    points = gen.cost_curve
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        slope = (y1 - y0) / (x1 - x0)
        segments.append((slope * base_power, y0 - slope * x0))
    return segments


def ramp_binding(rate: float, gen: ThermalGen, dt: float) -> bool:
    """Ramp rows are only needed when one step cannot span the full range."""
    return rate * dt < gen.p_max


class _ThermalFormulation(DeviceFormulation):
    device_type = "ThermalGen"

    def _register_initial_parameters(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        ic = ctx.initial_conditions
        for gen in self.devices:
            require_thermal_state(gen, ic)
            values = thermal_initial_values(
                gen,
                ic.on_status[gen.name],
                ic.power[gen.name],
                ic.duration[gen.name],
                ctx.horizon,
                ctx.dt,
            )
            for key, value in values.items():
                container.add_parameter(key, value)

    def _add_linear_cost(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for gen in self.devices:
            if gen.cost_curve or gen.variable_cost == 0.0:
                continue
            for t in ctx.steps:
                container.add_objective_term(VarKey(P, gen.name, t), gen.variable_cost * ctx.energy_scale)

    def _add_pwl_objective(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for gen in self.devices:
            if not gen.cost_curve:
                continue
            for t in ctx.steps:
                container.add_objective_term(VarKey(PWL, gen.name, t), ctx.dt)


class ThermalStandardUnitCommitment(_ThermalFormulation):
    """Commitment, startup and shutdown decisions with semicontinuous output.

    Per unit and step: ``on·P^lb ≤ p ≤ on·P^ub``; status transitions
    ``start − stop = on_τ − on_{τ−1}``; ``start + stop ≤ 1``; ramp limits
    relaxed by ``P^lb`` on start and stop steps; rolling minimum up and down
    windows plus rows carrying the unfinished windows of the initial state.
    Only ``OnStatus`` is integral.
    """

    name = "ThermalStandardUnitCommitment"

    def add_arguments(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        self._register_initial_parameters(container, ctx)
        for gen in self.devices:
            if gen.min_up > ctx.horizon * ctx.dt or gen.min_down > ctx.horizon * ctx.dt:
                logger.warning(
                    "Minimum up/down time of '%s' exceeds the %d-step horizon; "
                    "windows truncated to the horizon",
                    gen.name,
                    ctx.horizon,
                )
            for t in ctx.steps:
                p = VarKey(P, gen.name, t)
                container.add_variable(p, 0.0, gen.p_max)
                container.add_variable(VarKey(ON, gen.name, t), 0.0, 1.0, integral=True)
                container.add_variable(VarKey(START, gen.name, t), 0.0, 1.0)
                container.add_variable(VarKey(STOP, gen.name, t), 0.0, 1.0)
                if gen.cost_curve:
                    container.add_variable(VarKey(PWL, gen.name, t), 0.0, INF)
                container.add_to_expression(balance_key(gen.bus, t), p, 1.0)

    def add_constraints(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for gen in self.devices:
            self._add_limits(container, gen, ctx)
            self._add_transitions(container, gen, ctx)
            self._add_ramps(container, gen, ctx)
            self._add_min_times(container, gen, ctx)
            self._add_pwl_rows(container, gen, ctx)

    def _add_limits(self, container, gen: ThermalGen, ctx: BuildContext) -> None:
        for t in ctx.steps:
            p, on = VarKey(P, gen.name, t), VarKey(ON, gen.name, t)
            container.add_constraint(
                LinearConstraint(
                    constraint_name("ActivePowerUB", gen.name, t), _terms((p, 1.0), (on, -gen.p_max)), Sense.LE
                )
            )
            container.add_constraint(
                LinearConstraint(
                    constraint_name("ActivePowerLB", gen.name, t), _terms((p, -1.0), (on, gen.p_min)), Sense.LE
                )
            )

    def _add_transitions(self, container, gen: ThermalGen, ctx: BuildContext) -> None:
        initial_on = ParamKey(ParameterKind.INITIAL_ON_STATUS, gen.name, 0)
        for t in ctx.steps:
            start, stop = VarKey(START, gen.name, t), VarKey(STOP, gen.name, t)
            on = VarKey(ON, gen.name, t)
            terms = [(start, 1.0), (stop, -1.0), (on, -1.0)]
            params = {}
            if t == 1:
                params = {initial_on: -1.0}
            else:
                terms.append((VarKey(ON, gen.name, t - 1), 1.0))
            container.add_constraint(
                LinearConstraint(constraint_name("CommitmentStatus", gen.name, t), terms, Sense.EQ, 0.0, params)
            )
            container.add_constraint(
                LinearConstraint(constraint_name("StartStop", gen.name, t), [(start, 1.0), (stop, 1.0)], Sense.LE, 1.0)
            )

    def _add_ramps(self, container, gen: ThermalGen, ctx: BuildContext) -> None:
        initial_power = ParamKey(ParameterKind.INITIAL_POWER, gen.name, 0)
        if ramp_binding(gen.ramp_up, gen, ctx.dt):
            for t in ctx.steps:
                p, start = VarKey(P, gen.name, t), VarKey(START, gen.name, t)
                terms = _terms((p, 1.0), (start, -gen.p_min))
                params = {initial_power: 1.0} if t == 1 else {}
                if t > 1:
                    terms.append((VarKey(P, gen.name, t - 1), -1.0))
                container.add_constraint(
                    LinearConstraint(
                        constraint_name("RampUp", gen.name, t), terms, Sense.LE, gen.ramp_up * ctx.dt, params
                    )
                )
        else:
            logger.debug("Ramp-up of '%s' is not binding at dt=%sh; rows skipped", gen.name, ctx.dt)
        if ramp_binding(gen.ramp_down, gen, ctx.dt):
            for t in ctx.steps:
                p, stop = VarKey(P, gen.name, t), VarKey(STOP, gen.name, t)
                terms = _terms((p, -1.0), (stop, -gen.p_min))
                params = {initial_power: -1.0} if t == 1 else {}
                if t > 1:
                    terms.append((VarKey(P, gen.name, t - 1), 1.0))
                container.add_constraint(
                    LinearConstraint(
                        constraint_name("RampDown", gen.name, t), terms, Sense.LE, gen.ramp_down * ctx.dt, params
                    )
                )
        else:
            logger.debug("Ramp-down of '%s' is not binding at dt=%sh; rows skipped", gen.name, ctx.dt)

    def _add_min_times(self, container, gen: ThermalGen, ctx: BuildContext) -> None:
        up, down = window_steps(gen.min_up, ctx.dt), window_steps(gen.min_down, ctx.dt)
        for t in ctx.steps:
            on = VarKey(ON, gen.name, t)
            starts = [(VarKey(START, gen.name, s), 1.0) for s in range(max(1, t - up + 1), t + 1)]
            container.add_constraint(
                LinearConstraint(constraint_name("MinUpTime", gen.name, t), [*starts, (on, -1.0)], Sense.LE, 0.0)
            )
            stops = [(VarKey(STOP, gen.name, s), 1.0) for s in range(max(1, t - down + 1), t + 1)]
            container.add_constraint(
                LinearConstraint(constraint_name("MinDownTime", gen.name, t), [*stops, (on, 1.0)], Sense.LE, 1.0)
            )
        for t in range(1, min(ctx.horizon, up) + 1):
            key = ParamKey(ParameterKind.MIN_UP_INITIAL, gen.name, t)
            container.add_constraint(
                LinearConstraint(
                    constraint_name("MinUpInitial", gen.name, t),
                    [(VarKey(ON, gen.name, t), 1.0)],
                    Sense.GE,
                    0.0,
                    {key: 1.0},
                )
            )
        for t in range(1, min(ctx.horizon, down) + 1):
            key = ParamKey(ParameterKind.MIN_DOWN_INITIAL, gen.name, t)
            container.add_constraint(
                LinearConstraint(
                    constraint_name("MinDownInitial", gen.name, t),
                    [(VarKey(ON, gen.name, t), 1.0)],
                    Sense.LE,
                    0.0,
                    {key: 1.0},
                )
            )

    def _add_pwl_rows(self, container, gen: ThermalGen, ctx: BuildContext) -> None:
        if not gen.cost_curve:
            return
        for i, (slope, intercept) in enumerate(pwl_segments(gen, ctx.system.base_power)):
            for t in ctx.steps:
                terms = _terms(
                    (VarKey(P, gen.name, t), slope),
                    (VarKey(PWL, gen.name, t), -1.0),
                    (VarKey(ON, gen.name, t), intercept),
                )
                container.add_constraint(
                    LinearConstraint(constraint_name(f"PWLCostSegment{i}", gen.name, t), terms, Sense.LE)
                )

    def add_objective(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        self._add_linear_cost(container, ctx)
        self._add_pwl_objective(container, ctx)
        for gen in self.devices:
            for t in ctx.steps:
                if gen.no_load_cost:
                    container.add_objective_term(VarKey(ON, gen.name, t), gen.no_load_cost * ctx.dt)
                if gen.startup_cost:
                    container.add_objective_term(VarKey(START, gen.name, t), gen.startup_cost)


class ThermalBasicDispatch(_ThermalFormulation):
    """Continuous output within ``[P^lb, P^ub]`` with ramp limits; no commitment.

    A semicontinuous feedforward attached later relaxes the static bounds and
    moves them onto parameterized rows.
    """

    name = "ThermalBasicDispatch"

    def add_arguments(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        self._register_initial_parameters(container, ctx)
        for gen in self.devices:
            for t in ctx.steps:
                p = VarKey(P, gen.name, t)
                container.add_variable(p, gen.p_min, gen.p_max)
                if gen.cost_curve:
                    container.add_variable(VarKey(PWL, gen.name, t), 0.0, INF)
                container.add_to_expression(balance_key(gen.bus, t), p, 1.0)

    def add_constraints(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for gen in self.devices:
            initial_power = ParamKey(ParameterKind.INITIAL_POWER, gen.name, 0)
            for family, rate, sign in (("RampUp", gen.ramp_up, 1.0), ("RampDown", gen.ramp_down, -1.0)):
                if not ramp_binding(rate, gen, ctx.dt):
                    continue
                for t in ctx.steps:
                    terms = [(VarKey(P, gen.name, t), sign)]
                    params = {initial_power: sign} if t == 1 else {}
                    if t > 1:
                        terms.append((VarKey(P, gen.name, t - 1), -sign))
                    container.add_constraint(
                        LinearConstraint(constraint_name(family, gen.name, t), terms, Sense.LE, rate * ctx.dt, params)
                    )
            if gen.cost_curve:
                for i, (slope, intercept) in enumerate(pwl_segments(gen, ctx.system.base_power)):
                    for t in ctx.steps:
                        terms = _terms((VarKey(P, gen.name, t), slope), (VarKey(PWL, gen.name, t), -1.0))
                        container.add_constraint(
                            LinearConstraint(
                                constraint_name(f"PWLCostSegment{i}", gen.name, t), terms, Sense.LE, -intercept
                            )
                        )

    def add_objective(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        self._add_linear_cost(container, ctx)
        self._add_pwl_objective(container, ctx)


def _standalone_context(horizon: int, dt: float, ic: InitialConditions, base_power: float) -> BuildContext:
    return BuildContext(SystemModel(base_power=base_power), ProblemTemplate(), horizon, dt, ic)


def build_thermal_uc(
    container: OptimizationContainer,
    gens: list[ThermalGen],
    horizon: int,
    dt: float,
    initial_conditions: InitialConditions,
    *,
    base_power: float = 100.0,
) -> None:
    """Add the unit commitment model of ``gens`` to ``container``.

    Raises:
        BuildError: If a unit has no initial condition.
    """
    ThermalStandardUnitCommitment(gens).build(
        container, _standalone_context(horizon, dt, initial_conditions, base_power)
    )


def build_thermal_dispatch(
    container: OptimizationContainer,
    gens: list[ThermalGen],
    horizon: int,
    dt: float,
    initial_conditions: InitialConditions,
    *,
    base_power: float = 100.0,
) -> None:
    ThermalBasicDispatch(gens).build(
        container, _standalone_context(horizon, dt, initial_conditions, base_power)
    )
