"""Assemble a complete container from a template and a system."""

from __future__ import annotations

import logging
from typing import Iterable

from src.feedforwards.attach import attach_feedforward
from src.feedforwards.specs import FeedforwardSpec
from src.optimization.container import OptimizationContainer
from src.optimization.keys import ParameterKind
from src.optimization.sanity import sanity_check
from src.system.components import InitialConditions
from src.system.system import SystemModel

from .base import BuildContext, Formulation
from .catalog import SERVICE_FORMULATIONS, device_formulation
from .errors import BuildError
from .network import PTDFMatrix, make_network
from .renewable import MAX_ACTIVE_POWER
from .template import ProblemTemplate

logger = logging.getLogger(__name__)


def check_coverage(template: ProblemTemplate, sys: SystemModel) -> None:
    """Every component type present in ``sys`` needs a device formulation.

    Raises:
        BuildError: Naming the first uncovered type, unknown reserve or
            mismatched formulation.
    """
    for component_type in sys.component_types_present():
        if component_type not in template.devices:
            raise BuildError(f"template has no formulation for component type '{component_type}'")
        device_formulation(component_type, template.devices[component_type])
    for reserve, name in template.services.items():
        if reserve not in sys.reserves:
            raise BuildError(f"template names unknown reserve product '{reserve}'")
        if name not in SERVICE_FORMULATIONS:
            raise BuildError(f"unknown service formulation '{name}' for reserve '{reserve}'")


def _formulations(template: ProblemTemplate, sys: SystemModel) -> tuple[list[Formulation], list[Formulation]]:
    devices: list[Formulation] = []
    for component_type in sys.component_types_present():
        cls = device_formulation(component_type, template.devices[component_type])
        devices.append(cls(sys.components_of_type(component_type)))
    services: list[Formulation] = []
    for reserve, name in template.services.items():
        product = sys.reserves[reserve]
        if product.available:
            services.append(SERVICE_FORMULATIONS[name](product))
    return devices, services


def build_problem(
    template: ProblemTemplate,
    sys: SystemModel,
    horizon: int,
    dt: float,
    initial_conditions: InitialConditions,
    *,
    name: str = "",
    feedforwards: Iterable[FeedforwardSpec] = (),
    emulation: bool = False,
    ptdf: PTDFMatrix | None = None,
) -> OptimizationContainer:
    """Build the container of one model.

    Phases run in a fixed order: arguments of every formulation, network
    rows, device and service rows, feedforward rows, objective, and finally
    the sanity check, whose report is attached as ``container.sanity_report``.

    Args:
        template: Formulation choice per component type and service.
        sys: The power system.
        horizon: Number of steps.
        dt: Step length in hours.
        initial_conditions: Complete state before the first step.
        name: Model name recorded in the container metadata.
        feedforwards: Specs whose target is this model.
        emulation: Build the emulator variant with always-present slacks.
        ptdf: Precomputed PTDF for the PTDF network formulation.

    Raises:
        BuildError: On an uncovered component type, a missing initial
            condition or a fatal sanity finding.
    """
    if horizon <= 0:
        raise BuildError(f"horizon must be positive, got {horizon}")
    if dt <= 0:
        raise BuildError(f"step length must be positive, got {dt}h")
    check_coverage(template, sys)
    ctx = BuildContext(sys, template, horizon, dt, initial_conditions, emulation=emulation)
    container = OptimizationContainer(name)
    container.metadata["network"] = template.network
    devices, services = _formulations(template, sys)
    network = make_network(template, ptdf)

    for formulation in (*devices, *services, network):
        formulation.add_arguments(container, ctx)
    network.add_constraints(container, ctx)
    for formulation in (*devices, *services):
        formulation.add_constraints(container, ctx)
    for spec in feedforwards:
        attach_feedforward(container, spec, sys)
    for formulation in (*devices, *services, network):
        formulation.add_objective(container, ctx)

    report = sanity_check(container)
    container.sanity_report = report
    if report.fatal:
        details = "; ".join(str(f) for f in report.fatal[:5])
        raise BuildError(f"sanity check failed for '{name}': {details}")
    container.stamp_build_time()
    logger.info(
        "Built '%s': %d variables, %d rows, %d parameters (%s)",
        name,
        container.n_vars,
        container.n_rows,
        len(container.parameters),
        template.network,
    )
    return container


def forecast_requirements(template: ProblemTemplate, sys: SystemModel) -> list[tuple[str, str, str]]:
    """``(parameter kind, component, series label)`` for every time-series-driven parameter."""
    requirements = []
    for component_type in ("RenewableGen", "Load"):
        if component_type in template.devices:
            requirements += [
                (ParameterKind.FORECAST_BOUND, c.name, MAX_ACTIVE_POWER)
                for c in sys.components_of_type(component_type)
            ]
    for reserve in template.services:
        product = sys.reserves.get(reserve)
        if product is not None and product.available:
            requirements.append((ParameterKind.REQUIREMENT, product.name, product.requirement_series))
    return requirements
