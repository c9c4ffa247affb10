"""Shared build context and the formulation base classes.

A problem is assembled in phases: every formulation first registers its
variables, parameters and balance contributions (arguments), then the network
turns the balance expressions into rows, then devices and services add their
own rows, and finally every formulation adds its objective terms.
"""

from __future__ import annotations

from abc import ABC
from dataclasses import dataclass
from typing import ClassVar

from src.optimization.container import OptimizationContainer
from src.optimization.keys import ACTIVE_POWER_BALANCE, ExpressionKey
from src.system.components import InitialConditions
from src.system.system import SystemModel

from .template import ProblemTemplate

# Balance violation penalty in $/MWh.
SLACK_PENALTY = 1e5


@dataclass
class BuildContext:
    """Everything a formulation needs besides the container.

    Attributes:
        system: The power system.
        template: Template the problem is built from.
        horizon: Number of steps.
        dt: Step length in hours.
        initial_conditions: State before the first step.
        emulation: Build the single-step emulator variant, whose balance
            slacks always exist and are capped by a parameter unless the
            template asks for free slacks.
    """

    system: SystemModel
    template: ProblemTemplate
    horizon: int
    dt: float
    initial_conditions: InitialConditions
    emulation: bool = False

    @property
    def steps(self) -> range:
        return range(1, self.horizon + 1)

    @property
    def energy_scale(self) -> float:
        """Dollars per (p.u. sustained over one step) at 1 $/MWh."""
        return self.system.base_power * self.dt

    @property
    def has_slacks(self) -> bool:
        return self.template.use_slacks or self.emulation

    @property
    def caps_slacks(self) -> bool:
        return self.emulation and not self.template.use_slacks


def balance_key(bus: str, t: int) -> ExpressionKey:
    return ExpressionKey(ACTIVE_POWER_BALANCE, bus, t)


class Formulation(ABC):
    """One model of a set of components; each phase defaults to a no-op."""

    name: ClassVar[str] = ""

    def add_arguments(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        pass

    def add_constraints(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        pass

    def add_objective(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        pass

    def build(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        """Run every phase in order, for building one formulation on its own."""
        self.add_arguments(container, ctx)
        self.add_constraints(container, ctx)
        self.add_objective(container, ctx)


class DeviceFormulation(Formulation):
    """Formulation of every available device of one component type."""

    device_type: ClassVar[str] = ""

    def __init__(self, devices: list):
        self.devices = list(devices)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self.devices)} devices)"
