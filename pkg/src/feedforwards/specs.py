"""Declarative description of one feedforward between two models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from src.optimization.keys import ParameterKind, VariableKind
from src.system.components import DEVICE_TYPES
from src.system.system import SystemModel

from .errors import FeedforwardError

SEMI_CONTINUOUS = "SemiContinuous"
UPPER_BOUND = "UpperBound"
LOWER_BOUND = "LowerBound"
ENERGY_TARGET = "EnergyTarget"

# kind -> (source variable, target variable, parameter kind)
DEFAULTS = {
    SEMI_CONTINUOUS: (VariableKind.ON_STATUS, VariableKind.ACTIVE_POWER, ParameterKind.FEEDFORWARD_ON_STATUS),
    UPPER_BOUND: (VariableKind.ACTIVE_POWER, VariableKind.ACTIVE_POWER, ParameterKind.FEEDFORWARD_UPPER),
    LOWER_BOUND: (VariableKind.ACTIVE_POWER, VariableKind.ACTIVE_POWER, ParameterKind.FEEDFORWARD_LOWER),
    ENERGY_TARGET: (VariableKind.SOC, VariableKind.SOC, ParameterKind.ENERGY_TARGET),
}

# Shortfall penalty of soft energy targets, $/MWh.
DEFAULT_TARGET_PENALTY = 1e4


@dataclass(frozen=True)
class FeedforwardSpec:
    """One coupling from a source model's solution into a target model.

    Attributes:
        kind: ``SemiContinuous``, ``UpperBound``, ``LowerBound`` or ``EnergyTarget``.
        source: Name of the model whose results feed the parameters.
        target: Name of the model receiving the rows.
        components: Component names, or a single component type name
            standing for all available components of that type.
        source_variable: Variable kind read from the source results.
        target_variable: Variable kind constrained in the target.
        penalty: Shortfall penalty for ``EnergyTarget`` in $/MWh.
    """

    kind: str
    source: str
    target: str
    components: tuple[str, ...]
    source_variable: str = ""
    target_variable: str = ""
    penalty: float = DEFAULT_TARGET_PENALTY

    def __post_init__(self):
        if self.kind not in DEFAULTS:
            raise FeedforwardError(f"unknown feedforward kind '{self.kind}'")
        source_var, target_var, _ = DEFAULTS[self.kind]
        if not self.source_variable:
            object.__setattr__(self, "source_variable", source_var)
        if not self.target_variable:
            object.__setattr__(self, "target_variable", target_var)

    @property
    def parameter_kind(self) -> str:
        return DEFAULTS[self.kind][2]

    def resolve_components(self, system: SystemModel) -> list[str]:
        """Expand a component type name; check that listed names exist."""
        if len(self.components) == 1 and self.components[0] in DEVICE_TYPES:
            return [c.name for c in system.components_of_type(self.components[0])]
        for name in self.components:
            try:
                system.get_component(name)
            except KeyError:
                raise FeedforwardError(
                    f"{self.kind} feedforward {self.source}->{self.target} names unknown component '{name}'"
                ) from None
        return list(self.components)

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "FeedforwardSpec":
        components = data["components"]
        if isinstance(components, str):
            components = [components]
        return cls(
            kind=data["kind"],
            source=data["source"],
            target=data["target"],
            components=tuple(components),
            source_variable=data.get("source_variable", ""),
            target_variable=data.get("target_variable", ""),
            penalty=float(data.get("penalty", DEFAULT_TARGET_PENALTY)),
        )

    def to_mapping(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "source": self.source,
            "target": self.target,
            "components": list(self.components),
            "source_variable": self.source_variable,
            "target_variable": self.target_variable,
            "penalty": self.penalty,
        }
