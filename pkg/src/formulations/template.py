"""ProblemTemplate: which formulation models each part of the system."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

COPPER_PLATE = "CopperPlate"
PTDF_DC_POWER = "PTDFDCPower"


@dataclass
class ProblemTemplate:
    """Maps component types and services to formulation names.

    Attributes:
        network: Network formulation, ``CopperPlate`` or ``PTDFDCPower``.
        use_slacks: Add penalized balance slacks to the network rows.
        devices: Component type name (``"ThermalGen"``...) to formulation.
        services: Reserve product name to service formulation.
    """

    network: str = COPPER_PLATE
    use_slacks: bool = False
    devices: dict[str, str] = field(default_factory=dict)
    services: dict[str, str] = field(default_factory=dict)

    def set_device_model(self, component_type: str, formulation: str) -> None:
        self.devices[component_type] = formulation

    def set_service_model(self, reserve: str, formulation: str) -> None:
        self.services[reserve] = formulation

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "ProblemTemplate":
        network = data.get("network", {"formulation": COPPER_PLATE})
        if isinstance(network, str):
            network = {"formulation": network}
        return cls(
            network=network.get("formulation", COPPER_PLATE),
            use_slacks=bool(network.get("use_slacks", False)),
            devices=dict(data.get("devices", {})),
            services=dict(data.get("services", {})),
        )

    def to_mapping(self) -> dict[str, Any]:
        return {
            "network": {"formulation": self.network, "use_slacks": self.use_slacks},
            "devices": dict(sorted(self.devices.items())),
            "services": dict(sorted(self.services.items())),
        }
