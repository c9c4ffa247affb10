"""Range reserve service: requirement rows and headroom coupling."""

from __future__ import annotations

import logging

from src.optimization.container import INF, LinearConstraint, OptimizationContainer, Sense
from src.optimization.keys import ParameterKind, ParamKey, VariableKind, VarKey, constraint_name
from src.system.components import ReserveProduct

from .base import BuildContext, Formulation
from .errors import BuildError

logger = logging.getLogger(__name__)


def reserve_component(product: str, device: str) -> str:
    """Component name of a reserve variable, ``product/device``."""
    return f"{product}/{device}"


def requirement_key(product: str, t: int) -> ParamKey:
    return ParamKey(ParameterKind.REQUIREMENT, product, t)


class RangeReserve(Formulation):
    """Upward reserve held on thermal headroom or storage discharge room.

    Per step: ``Σ r ≥ requirement·param``; for each contributor
    ``p + r ≤ on·P^ub`` under unit commitment, ``p + r ≤ P^ub`` under
    dispatch, and ``p_out + r ≤ discharge_max`` for storage.
    """

    name = "RangeReserve"

    def __init__(self, product: ReserveProduct):
        self.product = product
        self.contributors: list[str] = []

    def add_arguments(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        product = self.product
        for device in product.contributing_devices:
            component = ctx.system.get_component(device)
            if not component.available:
                continue
            if type(component).__name__ not in ctx.template.devices:
                raise BuildError(
                    f"reserve '{product.name}' contributor '{device}' has no device formulation"
                )
            self.contributors.append(device)
        if not self.contributors:
            logger.warning("Reserve '%s' has no available contributors", product.name)
        for t in ctx.steps:
            container.add_parameter(requirement_key(product.name, t))
            for device in self.contributors:
                container.add_variable(
                    VarKey(VariableKind.RESERVE, reserve_component(product.name, device), t), 0.0, INF
                )

    def add_constraints(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        product = self.product
        for t in ctx.steps:
            reserves = [
                (VarKey(VariableKind.RESERVE, reserve_component(product.name, d), t), 1.0)
                for d in self.contributors
            ]
            if not reserves:
                continue
            container.add_constraint(
                LinearConstraint(
                    constraint_name("ReserveRequirement", product.name, t),
                    reserves,
                    Sense.GE,
                    0.0,
                    {requirement_key(product.name, t): product.requirement},
                )
            )
            for device in self.contributors:
                container.add_constraint(self._headroom(ctx, device, t))

    def _headroom(self, ctx: BuildContext, device: str, t: int) -> LinearConstraint:
        component = ctx.system.get_component(device)
        component_type = type(component).__name__
        r = VarKey(VariableKind.RESERVE, reserve_component(self.product.name, device), t)
        name = constraint_name("ReserveHeadroom", reserve_component(self.product.name, device), t)
        if component_type == "Storage":
            return LinearConstraint(
                name, [(VarKey(VariableKind.POWER_OUT, device, t), 1.0), (r, 1.0)], Sense.LE, component.discharge_max
            )
        p = VarKey(VariableKind.ACTIVE_POWER, device, t)
        if ctx.template.devices[component_type] == "ThermalStandardUnitCommitment":
            on = VarKey(VariableKind.ON_STATUS, device, t)
            return LinearConstraint(name, [(p, 1.0), (r, 1.0), (on, -component.p_max)], Sense.LE, 0.0)
        return LinearConstraint(name, [(p, 1.0), (r, 1.0)], Sense.LE, component.p_max)


def build_reserve(container: OptimizationContainer, product: ReserveProduct, ctx: BuildContext) -> None:
    """Add one reserve product; its contributors must already be in ``container``."""
    RangeReserve(product).build(container, ctx)
