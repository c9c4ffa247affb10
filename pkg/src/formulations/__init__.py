"""
Formulations Module

Device, network and service models that fill an optimization container, the
ProblemTemplate choosing among them, and the phased problem builder.
"""

from src.formulations.base import BuildContext, DeviceFormulation, Formulation
from src.formulations.builder import build_problem, check_coverage, forecast_requirements
from src.formulations.catalog import (
    DEVICE_FORMULATIONS,
    NETWORK_FORMULATIONS,
    SERVICE_FORMULATIONS,
    device_formulation,
)
from src.formulations.errors import BuildError
from src.formulations.initial import (
    apply_initial_conditions,
    descriptor_initial_conditions,
    initial_condition_values,
    placeholder_initial_conditions,
)
from src.formulations.network import (
    CopperPlate,
    PTDFDCPower,
    PTDFMatrix,
    build_network_copperplate,
    build_network_ptdf,
    compute_ptdf,
)
from src.formulations.renewable import (
    MAX_ACTIVE_POWER,
    RenewableFullDispatch,
    StaticPowerLoad,
    build_load,
    build_renewable,
)
from src.formulations.reserves import RangeReserve, build_reserve
from src.formulations.storage import StorageBasicDispatch, build_storage
from src.formulations.template import COPPER_PLATE, PTDF_DC_POWER, ProblemTemplate
from src.formulations.thermal import (
    ThermalBasicDispatch,
    ThermalStandardUnitCommitment,
    build_thermal_dispatch,
    build_thermal_uc,
)

__all__ = [
    "BuildContext",
    "BuildError",
    "COPPER_PLATE",
    "CopperPlate",
    "DEVICE_FORMULATIONS",
    "DeviceFormulation",
    "Formulation",
    "MAX_ACTIVE_POWER",
    "NETWORK_FORMULATIONS",
    "PTDFDCPower",
    "PTDFMatrix",
    "PTDF_DC_POWER",
    "ProblemTemplate",
    "RangeReserve",
    "RenewableFullDispatch",
    "SERVICE_FORMULATIONS",
    "StaticPowerLoad",
    "StorageBasicDispatch",
    "ThermalBasicDispatch",
    "ThermalStandardUnitCommitment",
    "apply_initial_conditions",
    "build_load",
    "build_network_copperplate",
    "build_network_ptdf",
    "build_problem",
    "build_renewable",
    "build_reserve",
    "build_storage",
    "build_thermal_dispatch",
    "build_thermal_uc",
    "check_coverage",
    "compute_ptdf",
    "descriptor_initial_conditions",
    "device_formulation",
    "forecast_requirements",
    "initial_condition_values",
    "placeholder_initial_conditions",
]
