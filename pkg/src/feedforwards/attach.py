"""Rows and parameters a feedforward adds to its target container.

Every feedforward value enters through a parameter on a right-hand side, so
later updates never change the sparsity pattern of the target.
"""

from __future__ import annotations

import logging
import math

from src.optimization.container import INF, LinearConstraint, OptimizationContainer, Sense
from src.optimization.keys import ParameterKind, ParamKey, VariableKind, VarKey, constraint_name
from src.system.components import ThermalGen
from src.system.system import SystemModel

from .errors import FeedforwardError
from .specs import ENERGY_TARGET, LOWER_BOUND, SEMI_CONTINUOUS, UPPER_BOUND, FeedforwardSpec

logger = logging.getLogger(__name__)

# Finite stand-in when a bounded variable has no static limit.
_OPEN_BOUND = 1e6


def target_steps(container: OptimizationContainer, kind: str, component: str) -> list[int]:
    return sorted(v.key.t for v in container.variables_of_kind(kind) if v.key.component == component)


def _steps_or_raise(container: OptimizationContainer, spec: FeedforwardSpec, component: str) -> list[int]:
    steps = target_steps(container, spec.target_variable, component)
    if not steps:
        raise FeedforwardError(
            f"{spec.kind} feedforward into '{container.name}': target variable "
            f"{spec.target_variable} missing for '{component}'"
        )
    return steps


def attach_semicontinuous(container: OptimizationContainer, spec: FeedforwardSpec, system: SystemModel) -> None:
    """Replace the static output bounds with ``P^lb·v ≤ p ≤ P^ub·v``.

    ``v`` is a ``FeedforwardOnStatus`` parameter per unit and step, 1 until the
    first update. Ramp rows of a target without its own commitment variables
    get start and stop allowances so a unit can jump to ``P^lb`` when ``v``
    switches on and leave any output when it switches off.
    """
    for name in spec.resolve_components(system):
        gen = system.get_component(name)
        for t in _steps_or_raise(container, spec, name):
            p = VarKey(spec.target_variable, name, t)
            status = ParamKey(spec.parameter_kind, name, t)
            container.add_parameter(status, 1.0)
            container.set_variable_bounds(p, 0.0, gen.p_max)
            container.add_constraint(
                LinearConstraint(
                    constraint_name("FeedforwardSemiContinuousUB", name, t), [(p, 1.0)], Sense.LE, 0.0, {status: gen.p_max}
                )
            )
            container.add_constraint(
                LinearConstraint(
                    constraint_name("FeedforwardSemiContinuousLB", name, t), [(p, -1.0)], Sense.LE, 0.0, {status: -gen.p_min}
                )
            )
            if not container.has_variable(VarKey(VariableKind.START_UP, name, t)):
                _bind_transition_allowances(container, gen, t)


def _bind_transition_allowances(container: OptimizationContainer, gen: ThermalGen, t: int) -> None:
    allowances = (
        ("RampUp", ParameterKind.FEEDFORWARD_START_ALLOWANCE, gen.p_min),
        ("RampDown", ParameterKind.FEEDFORWARD_STOP_ALLOWANCE, gen.p_max),
    )
    for family, kind, multiplier in allowances:
        row = constraint_name(family, gen.name, t)
        if not container.has_constraint(row) or multiplier == 0.0:
            continue
        key = ParamKey(kind, gen.name, t)
        container.add_parameter(key, 0.0)
        container.bind_parameter(row, key, multiplier)


def attach_bound(
    container: OptimizationContainer, spec: FeedforwardSpec, system: SystemModel, direction: str
) -> None:
    """Add ``x ≤ param`` (``direction="upper"``) or ``x ≥ param`` (``"lower"``)."""
    if direction not in ("upper", "lower"):
        raise FeedforwardError(f"bound direction must be 'upper' or 'lower', got '{direction}'")
    sense = Sense.LE if direction == "upper" else Sense.GE
    family = "FeedforwardUpperBound" if direction == "upper" else "FeedforwardLowerBound"
    for name in spec.resolve_components(system):
        for t in _steps_or_raise(container, spec, name):
            x = VarKey(spec.target_variable, name, t)
            var = container.variable(x)
            initial = var.ub if direction == "upper" else var.lb
            if not math.isfinite(initial):
                initial = _OPEN_BOUND if direction == "upper" else -_OPEN_BOUND
            key = ParamKey(spec.parameter_kind, name, t)
            container.add_parameter(key, initial)
            container.add_constraint(LinearConstraint(constraint_name(family, name, t), [(x, 1.0)], sense, 0.0, {key: 1.0}))


def attach_energy_target(container: OptimizationContainer, spec: FeedforwardSpec, system: SystemModel) -> None:
    """Soft end-of-horizon target ``SoC_H + shortage ≥ param``, shortage penalized."""
    for name in spec.resolve_components(system):
        last = _steps_or_raise(container, spec, name)[-1]
        soc = VarKey(spec.target_variable, name, last)
        shortage = VarKey(VariableKind.ENERGY_SHORTAGE, name, last)
        key = ParamKey(spec.parameter_kind, name, last)
        container.add_parameter(key, 0.0)
        container.add_variable(shortage, 0.0, INF)
        container.add_constraint(
            LinearConstraint(
                constraint_name("FeedforwardEnergyTarget", name, last),
                [(soc, 1.0), (shortage, 1.0)],
                Sense.GE,
                0.0,
                {key: 1.0},
            )
        )
        container.add_objective_term(shortage, spec.penalty * system.base_power)


def attach_feedforward(container: OptimizationContainer, spec: FeedforwardSpec, system: SystemModel) -> None:
    if spec.kind == SEMI_CONTINUOUS:
        attach_semicontinuous(container, spec, system)
    elif spec.kind == UPPER_BOUND:
        attach_bound(container, spec, system, "upper")
    elif spec.kind == LOWER_BOUND:
        attach_bound(container, spec, system, "lower")
    elif spec.kind == ENERGY_TARGET:
        attach_energy_target(container, spec, system)
    logger.debug("Attached %s feedforward %s -> %s", spec.kind, spec.source, container.name)
