"""EmulationModel: the myopic single-step model that produces the system state."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Iterable

from src.feedforwards.specs import FeedforwardSpec
from src.feedforwards.update import update_feedforward_params
from src.formulations.builder import build_problem, forecast_requirements
from src.formulations.initial import apply_initial_conditions, placeholder_initial_conditions
from src.formulations.network import PTDFMatrix
from src.formulations.template import ProblemTemplate
from src.optimization.container import OptimizationContainer
from src.optimization.keys import ParameterKind, ParamKey, VariableKind
from src.sequence.chronology import get_initial_conditions
from src.sequence.sequence import INTER_PROBLEM
from src.sequence.state import SimulationState
from src.sequence.timing import format_duration
from src.solver.interface import Solver, make_solver
from src.solver.types import SolveResult, SolverOptions
from src.system.components import InitialConditions
from src.system.errors import RealizationNotFoundError
from src.system.system import SystemModel, get_realization
from src.system.units import hours

from .errors import ModelSolveError, StaleStateError
from .solution import EmulationSolution, collect_trajectories

logger = logging.getLogger(__name__)

# Slack cap (p.u.) of the penalized retry after an infeasible first attempt.
RETRY_SLACK_CAP = 1e4


@dataclass
class EmulationModel:
    """One-step model solved against realized data at every fine step.

    Attributes:
        name: Model name.
        template: Formulation choices; usually a dispatch template.
        system: The power system.
        resolution: Length of the single step.
        container: Built once with balance slacks.
        solver: Engine attached at build time.
        feedforwards: Couplings whose target is the emulator.
        last_solution: Most recent solution.
        last_time: Time of the most recent step.
        retries: Steps that needed the penalized slack retry.
    """

    name: str
    template: ProblemTemplate
    system: SystemModel
    resolution: timedelta
    container: OptimizationContainer
    solver: Solver
    feedforwards: list[FeedforwardSpec] = field(default_factory=list)
    last_solution: EmulationSolution | None = None
    last_time: datetime | None = None
    retries: int = 0
    solves: int = 0

    horizon_steps = 1

    @property
    def interval(self) -> timedelta:
        return self.resolution

    @property
    def dt(self) -> float:
        return hours(self.resolution)


def check_realization_data(name: str, template: ProblemTemplate, sys: SystemModel, resolution: timedelta) -> None:
    """Every time-series-driven parameter needs actuals on a grid dividing ``resolution``.

    Raises:
        RealizationNotFoundError: Missing series or incompatible grid.
    """
    for _, component, label in forecast_requirements(template, sys):
        series = sys.time_series.get_realization_series(component, label)
        if resolution % series.resolution:
            raise RealizationNotFoundError(
                f"realization '{component}/{label}' at {format_duration(series.resolution)} "
                f"cannot feed emulator '{name}' at {format_duration(resolution)}"
            )


def build_emulation_model(
    name: str,
    template: ProblemTemplate,
    sys: SystemModel,
    resolution: timedelta,
    *,
    initial_conditions: InitialConditions | None = None,
    feedforwards: Iterable[FeedforwardSpec] = (),
    solver_options: SolverOptions | None = None,
    ptdf: PTDFMatrix | None = None,
) -> EmulationModel:
    """Build the single-step emulator container.

    Raises:
        RealizationNotFoundError: On missing realization data.
        BuildError: On a build failure.
    """
    if resolution <= timedelta(0):
        raise ValueError(f"emulator '{name}' needs a positive resolution")
    check_realization_data(name, template, sys, resolution)
    feedforwards = list(feedforwards)
    container = build_problem(
        template,
        sys,
        1,
        hours(resolution),
        initial_conditions or placeholder_initial_conditions(sys),
        name=name,
        feedforwards=feedforwards,
        emulation=True,
        ptdf=ptdf,
    )
    return EmulationModel(
        name=name,
        template=template,
        system=sys,
        resolution=resolution,
        container=container,
        solver=make_solver(solver_options),
        feedforwards=feedforwards,
    )


def _set_slack_caps(container: OptimizationContainer, cap: float) -> int:
    keys = container.parameters_of_kind(ParameterKind.SLACK_CAP)
    for key in keys:
        container.update_parameter(key, cap)
    return len(keys)


def _net_slack(result: SolveResult) -> float:
    slack = 0.0
    for key, value in result.primal.items():
        if key.kind == VariableKind.SLACK_UP:
            slack += value
        elif key.kind == VariableKind.SLACK_DOWN:
            slack -= value
    return slack


def run_emulation_step(
    model: EmulationModel,
    at: datetime,
    state: SimulationState,
    *,
    execution: int = 0,
    initial_conditions: InitialConditions | None = None,
) -> EmulationSolution:
    """Solve one step at ``at`` with realized data.

    Initial conditions come from the system state just before ``at``;
    feedforward parameters from the latest decisions. Balance slacks are
    capped at zero first; an infeasible step is retried once with a large
    cap, at the slack penalty, and flagged. Forecasts are never read.

    Raises:
        TimeSeriesError: If a realization is missing at ``at``.
        ModelSolveError: If the retry is infeasible too.
    """
    if model.last_time is not None and at <= model.last_time:
        raise StaleStateError(
            f"emulator '{model.name}' stepped at {model.last_time.isoformat()} cannot step at {at.isoformat()}"
        )
    container = model.container
    for kind, component, label in forecast_requirements(model.template, model.system):
        key = ParamKey(kind, component, 1)
        if container.has_parameter(key):
            container.update_parameter(key, get_realization(model.system, component, label, at))
    if initial_conditions is None:
        initial_conditions = get_initial_conditions(model, at, state, INTER_PROBLEM)
    apply_initial_conditions(container, model.system, initial_conditions, 1, model.dt)
    update_feedforward_params(model, state, at)

    capped = _set_slack_caps(container, 0.0) > 0
    result = model.solver.solve(container)
    retried = False
    if not result.is_optimal and capped:
        logger.warning(
            "Emulator '%s' %s at %s; retrying with penalized balance slacks",
            model.name,
            result.status.value,
            at.isoformat(),
        )
        _set_slack_caps(container, RETRY_SLACK_CAP)
        result = model.solver.solve(container)
        retried = True
        model.retries += 1
    model.solves += 1
    model.last_time = at
    if not result.is_optimal:
        raise ModelSolveError(model.name, result.status.value, at, result.message)

    slack = _net_slack(result)
    if abs(slack) > 1e-9:
        logger.warning("Emulator '%s' used %.6g p.u. of balance slack at %s", model.name, slack, at.isoformat())
    solution = EmulationSolution(
        model=model.name,
        issue_time=at,
        resolution=model.resolution,
        horizon_steps=1,
        realized_steps=1,
        execution=execution,
        status=result.status,
        objective=result.objective,
        values=result.primal,
        duals=result.duals,
        parameters=container.parameters,
        stats=result.stats,
        trajectories=collect_trajectories(container, result.primal, model.system, 1),
        slack=slack,
        retried=retried,
    )
    model.last_solution = solution
    return solution
