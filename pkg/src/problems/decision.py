"""DecisionModel: a template-built container solved once per interval."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any, Iterable

from src.feedforwards.specs import FeedforwardSpec
from src.feedforwards.update import update_feedforward_params
from src.formulations.builder import build_problem, forecast_requirements
from src.formulations.initial import apply_initial_conditions, placeholder_initial_conditions
from src.formulations.network import PTDFMatrix
from src.formulations.template import ProblemTemplate
from src.optimization.container import OptimizationContainer
from src.optimization.keys import ParamKey
from src.sequence.chronology import get_initial_conditions
from src.sequence.sequence import INTER_PROBLEM
from src.sequence.state import SimulationState
from src.sequence.timing import check_model_timing, format_duration
from src.solver.interface import Solver, make_solver
from src.solver.types import SolverOptions
from src.system.components import InitialConditions
from src.system.errors import ForecastNotFoundError
from src.system.system import SystemModel, get_forecast_window
from src.system.units import hours

from .errors import ModelSolveError, StaleStateError
from .solution import DecisionSolution, collect_trajectories

logger = logging.getLogger(__name__)


@dataclass
class DecisionModel:
    """Forward-looking model re-executed every ``interval``.

    Attributes:
        name: Model name, unique in a sequence.
        template: Formulation choices.
        system: The power system.
        horizon_steps: Steps optimized per execution.
        resolution: Step length.
        interval: Cadence of executions; only steps inside it are realized.
        container: Built once, updated in place per execution.
        solver: Engine attached at build time.
        feedforwards: Couplings whose target is this model.
        chronology: Initial-condition chronology override, or None.
        last_solution: Most recent solution.
        last_issue_time: Issue time of the most recent update.
    """

    name: str
    template: ProblemTemplate
    system: SystemModel
    horizon_steps: int
    resolution: timedelta
    interval: timedelta
    container: OptimizationContainer
    solver: Solver
    feedforwards: list[FeedforwardSpec] = field(default_factory=list)
    chronology: str | None = None
    last_solution: DecisionSolution | None = None
    last_issue_time: datetime | None = None
    solves: int = 0

    @property
    def dt(self) -> float:
        return hours(self.resolution)

    @property
    def realized_steps(self) -> int:
        return self.interval // self.resolution


def check_forecast_data(name: str, template: ProblemTemplate, sys: SystemModel, resolution: timedelta) -> None:
    """Every forecast-driven parameter needs a forecast at ``resolution``.

    Raises:
        ForecastNotFoundError: Missing series or mismatched resolution.
    """
    for _, component, label in forecast_requirements(template, sys):
        forecast = sys.time_series.get_forecast(component, label)
        if forecast.resolution != resolution:
            raise ForecastNotFoundError(
                f"forecast '{component}/{label}' has resolution {format_duration(forecast.resolution)}, "
                f"model '{name}' needs {format_duration(resolution)}"
            )


def build_decision_model(
    name: str,
    template: ProblemTemplate,
    sys: SystemModel,
    horizon: int,
    resolution: timedelta,
    interval: timedelta,
    *,
    initial_conditions: InitialConditions | None = None,
    feedforwards: Iterable[FeedforwardSpec] = (),
    solver_options: SolverOptions | None = None,
    chronology: str | None = None,
    ptdf: PTDFMatrix | None = None,
) -> DecisionModel:
    """Validate timing and data, then build the container and attach a solver.

    Initial conditions only seed parameter values; every execution
    overwrites them. Without any, an unconstraining placeholder state is used.

    Raises:
        TimingError: On an interval/resolution/horizon violation.
        ForecastNotFoundError: On missing or mismatched forecast data.
        BuildError: On a build failure.
    """
    check_model_timing(name, horizon, resolution, interval)
    check_forecast_data(name, template, sys, resolution)
    feedforwards = list(feedforwards)
    container = build_problem(
        template,
        sys,
        horizon,
        hours(resolution),
        initial_conditions or placeholder_initial_conditions(sys),
        name=name,
        feedforwards=feedforwards,
        ptdf=ptdf,
    )
    return DecisionModel(
        name=name,
        template=template,
        system=sys,
        horizon_steps=horizon,
        resolution=resolution,
        interval=interval,
        container=container,
        solver=make_solver(solver_options),
        feedforwards=feedforwards,
        chronology=chronology,
    )


def update_forecast_params(model: Any, issue_time: datetime) -> int:
    """Write the forecast window issued at ``issue_time`` into every forecast parameter."""
    updated = 0
    for kind, component, label in forecast_requirements(model.template, model.system):
        window = get_forecast_window(model.system, component, label, issue_time, model.horizon_steps)
        for t, value in enumerate(window, start=1):
            key = ParamKey(kind, component, t)
            if model.container.has_parameter(key):
                model.container.update_parameter(key, float(value))
                updated += 1
    return updated


def update_decision_model(
    model: DecisionModel,
    issue_time: datetime,
    state: SimulationState,
    chronology: str | None = None,
    *,
    initial_conditions: InitialConditions | None = None,
) -> None:
    """Refresh every parameter of ``model`` for an execution at ``issue_time``.

    Forecasts come from the window issued at ``issue_time``, initial
    conditions from ``state`` through the chosen chronology (or are given
    explicitly) and feedforward parameters from the latest decisions of
    their source models. The container structure never changes.

    Raises:
        StaleStateError: If ``issue_time`` precedes the previous execution.
        TimeSeriesError: If the forecast window is absent.
        ColdStartError: If the chronology finds no prior value.
        FeedforwardGapError: If a feedforward source does not cover a step.
    """
    if model.last_issue_time is not None and issue_time < model.last_issue_time:
        raise StaleStateError(
            f"'{model.name}' executed at {model.last_issue_time.isoformat()} cannot go back to "
            f"{issue_time.isoformat()}"
        )
    forecasts = update_forecast_params(model, issue_time)
    if initial_conditions is None:
        chosen = chronology or model.chronology or INTER_PROBLEM
        initial_conditions = get_initial_conditions(model, issue_time, state, chosen)
    apply_initial_conditions(model.container, model.system, initial_conditions, model.horizon_steps, model.dt)
    feedforwards = update_feedforward_params(model, state, issue_time)
    model.last_issue_time = issue_time
    logger.debug(
        "Updated '%s' for %s: %d forecast and %d feedforward parameters",
        model.name,
        issue_time.isoformat(),
        forecasts,
        feedforwards,
    )


def solve_decision_model(model: DecisionModel, execution: int = 0) -> DecisionSolution:
    """Solve the current instance of ``model``.

    The first ``interval / resolution`` steps of the returned trajectories
    are the realized part; the remainder is look-ahead.

    Raises:
        ModelSolveError: If the solve does not end optimal.
    """
    if model.last_issue_time is None:
        raise StaleStateError(f"'{model.name}' must be updated before it is solved")
    result = model.solver.solve(model.container)
    model.solves += 1
    if not result.is_optimal:
        raise ModelSolveError(model.name, result.status.value, model.last_issue_time, result.message)
    solution = DecisionSolution(
        model=model.name,
        issue_time=model.last_issue_time,
        resolution=model.resolution,
        horizon_steps=model.horizon_steps,
        realized_steps=model.realized_steps,
        execution=execution,
        status=result.status,
        objective=result.objective,
        values=result.primal,
        duals=result.duals,
        parameters=model.container.parameters,
        stats=result.stats,
        trajectories=collect_trajectories(model.container, result.primal, model.system, model.horizon_steps),
    )
    model.last_solution = solution
    return solution
