"""Initial-condition chronologies and state updates from solutions."""

from __future__ import annotations

import logging
import math
from datetime import datetime, timedelta
from typing import Any, Protocol

import numpy as np

from src.optimization.keys import VariableKind
from src.system.components import InitialConditions
from src.system.system import SystemModel

from .errors import ColdStartError
from .sequence import INTER_PROBLEM, INTRA_PROBLEM
from .state import SimulationState, StateSeries

logger = logging.getLogger(__name__)

DECISION = "decision"
EMULATION = "emulation"


class StatefulModel(Protocol):
    name: str
    system: SystemModel


class Trajectories(Protocol):
    model: str
    issue_time: datetime
    resolution: timedelta
    realized_steps: int
    execution: int
    trajectories: dict[tuple[str, str], np.ndarray]


def get_initial_conditions(
    model: StatefulModel, issue_time: datetime, state: SimulationState, chronology: str
) -> InitialConditions:
    """Initial conditions for ``model`` executing at ``issue_time``.

    ``InterProblemChronology`` reads the system state x just before
    ``issue_time``; ``IntraProblemChronology`` reads the model's own realized
    decisions u. Durations count back over the same trajectory.

    Raises:
        ColdStartError: If the chosen trajectory has no value there.
    """
    if chronology not in (INTER_PROBLEM, INTRA_PROBLEM):
        raise ValueError(f"unknown chronology '{chronology}'")
    slot = state.slot(issue_time) - 1

    def series(kind: str, component: str) -> StateSeries:
        if chronology == INTER_PROBLEM:
            return state.system_series(kind, component)
        return state.decision_series(model.name, kind, component)

    def value(s: StateSeries, kind: str, component: str) -> float:
        v = s.values[slot]
        if math.isnan(v):
            source = "system state" if chronology == INTER_PROBLEM else f"decisions of '{model.name}'"
            raise ColdStartError(
                f"no {kind} value for '{component}' before {issue_time.isoformat()} in {source}"
            )
        return float(v)

    ic = InitialConditions()
    for gen in model.system.components_of_type("ThermalGen"):
        status = series(VariableKind.ON_STATUS, gen.name)
        on = value(status, VariableKind.ON_STATUS, gen.name) > 0.5
        ic.on_status[gen.name] = on
        ic.power[gen.name] = value(series(VariableKind.ACTIVE_POWER, gen.name), VariableKind.ACTIVE_POWER, gen.name)
        ic.duration[gen.name] = state.status_duration(status, slot, gen.name)
    for unit in model.system.components_of_type("Storage"):
        ic.soc[unit.name] = value(series(VariableKind.SOC, unit.name), VariableKind.SOC, unit.name)
    return ic


def update_state(state: SimulationState, solution: Trajectories, kind: str, *, writes_system: bool = False) -> None:
    """Record a solution.

    Decision solutions write u: realized steps to the trajectory, the rest to
    the look-ahead layer. Emulation solutions write x. A decision model that
    stands in for a missing emulator also writes its realized steps to x
    (``writes_system``).
    """
    if kind == DECISION:
        for (var_kind, component), values in solution.trajectories.items():
            state.write_decision(
                solution.model,
                var_kind,
                component,
                solution.issue_time,
                solution.resolution,
                values,
                solution.realized_steps,
                solution.execution,
            )
            if writes_system:
                for tau, value in enumerate(values[: solution.realized_steps], start=1):
                    at = solution.issue_time + (tau - 1) * solution.resolution
                    if state.slot_or_none(at) is None:
                        break
                    state.write_system(var_kind, component, at, solution.resolution, float(value), solution.execution)
    elif kind == EMULATION:
        for (var_kind, component), values in solution.trajectories.items():
            state.write_system(
                var_kind, component, solution.issue_time, solution.resolution, float(values[0]), solution.execution
            )
    else:
        raise ValueError(f"unknown solution kind '{kind}'")


def initial_conditions_snapshot(ic: InitialConditions) -> dict[str, Any]:
    return {
        "on_status": dict(sorted(ic.on_status.items())),
        "power": dict(sorted(ic.power.items())),
        "duration": dict(sorted(ic.duration.items())),
        "soc": dict(sorted(ic.soc.items())),
    }
