"""Solutions of decision and emulation models."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from src.optimization.container import OptimizationContainer
from src.optimization.keys import ParameterKind, ParamKey, VariableKind, VarKey, parse_constraint_name
from src.solver.types import SolveStats, SolveStatus
from src.system.system import SystemModel

# Output above this (p.u.) counts as committed when no status is modeled.
COMMITTED_OUTPUT = 1e-6


def collect_trajectories(
    container: OptimizationContainer, values: dict[VarKey, float], system: SystemModel, horizon: int
) -> dict[tuple[str, str], np.ndarray]:
    """Per ``(kind, component)`` horizon vectors of a primal solution.

    Thermal units modeled without a commitment variable get a derived
    ``OnStatus``: the semicontinuous feedforward status when present, else
    whether the unit produces.
    """
    trajectories: dict[tuple[str, str], np.ndarray] = {}
    for key, value in values.items():
        series = trajectories.get((key.kind, key.component))
        if series is None:
            series = trajectories[(key.kind, key.component)] = np.full(horizon, np.nan)
        series[key.t - 1] = value
    for gen in system.components_of_type("ThermalGen"):
        power = trajectories.get((VariableKind.ACTIVE_POWER, gen.name))
        if power is None or (VariableKind.ON_STATUS, gen.name) in trajectories:
            continue
        status = np.empty(horizon)
        for t in range(1, horizon + 1):
            key = ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, gen.name, t)
            if container.has_parameter(key):
                status[t - 1] = container.parameter_value(key)
            else:
                status[t - 1] = 1.0 if power[t - 1] > COMMITTED_OUTPUT else 0.0
        trajectories[(VariableKind.ON_STATUS, gen.name)] = status
    return dict(sorted(trajectories.items()))


@dataclass
class ModelSolution:
    """Optimal solution of one execution.

    Attributes:
        model: Model name.
        issue_time: Start of the first step.
        resolution: Step length.
        horizon_steps: Steps solved.
        realized_steps: Leading steps implemented; the rest is look-ahead.
        execution: Sequence number of the execution in the simulation.
        status: Solver status (always optimal for stored solutions).
        objective: Objective value.
        values: Primal values by variable key.
        duals: Row duals by row name, for continuous problems.
        parameters: Parameter values in force at solve time.
        stats: Solver statistics.
        trajectories: Horizon vectors per ``(kind, component)``.
    """

    model: str
    issue_time: datetime
    resolution: timedelta
    horizon_steps: int
    realized_steps: int
    execution: int
    status: SolveStatus
    objective: float
    values: dict[VarKey, float]
    duals: dict[str, float] | None
    parameters: dict[ParamKey, float]
    stats: SolveStats
    trajectories: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)

    @property
    def timestamps(self) -> list[datetime]:
        return [self.issue_time + i * self.resolution for i in range(self.horizon_steps)]

    def trajectory(self, kind: str, component: str) -> np.ndarray:
        return self.trajectories[(kind, component)]

    def realized(self, kind: str, component: str) -> np.ndarray:
        return self.trajectory(kind, component)[: self.realized_steps]

    def lookahead(self, kind: str, component: str) -> np.ndarray:
        return self.trajectory(kind, component)[self.realized_steps :]

    def variable_matrix(self, kind: str, components: list[str]) -> np.ndarray:
        """``horizon × components`` matrix of one variable kind, NaN where absent."""
        matrix = np.full((self.horizon_steps, len(components)), np.nan)
        for j, component in enumerate(components):
            series = self.trajectories.get((kind, component))
            if series is not None:
                matrix[:, j] = series
        return matrix

    def parameter_matrix(self, kind: str, components: list[str]) -> np.ndarray:
        matrix = np.full((self.horizon_steps, len(components)), np.nan)
        index = {c: j for j, c in enumerate(components)}
        for key, value in self.parameters.items():
            if key.kind == kind and key.component in index and 1 <= key.t <= self.horizon_steps:
                matrix[key.t - 1, index[key.component]] = value
        return matrix

    def dual_matrix(self, family: str, components: list[str]) -> np.ndarray:
        matrix = np.full((self.horizon_steps, len(components)), np.nan)
        if not self.duals:
            return matrix
        index = {c: j for j, c in enumerate(components)}
        for name, value in self.duals.items():
            row_family, component, t = parse_constraint_name(name)
            if row_family == family and component in index and 1 <= t <= self.horizon_steps:
                matrix[t - 1, index[component]] = value
        return matrix


@dataclass
class DecisionSolution(ModelSolution):
    pass


@dataclass
class EmulationSolution(ModelSolution):
    """Single-step solution; ``slack`` is the net balance slack used (p.u.)."""

    slack: float = 0.0
    retried: bool = False


def layout_components(container: OptimizationContainer) -> dict[str, dict[str, list[str]]]:
    """Component axes of every variable kind, parameter kind and row family.

    Initial-condition parameters (step 0) are left out.
    """
    variables: dict[str, set[str]] = defaultdict(set)
    for var in container.variables:
        variables[var.key.kind].add(var.key.component)
    parameters: dict[str, set[str]] = defaultdict(set)
    for key in container.parameters:
        if key.t >= 1:
            parameters[key.kind].add(key.component)
    duals: dict[str, set[str]] = defaultdict(set)
    for con in container.constraints:
        family, component, _ = parse_constraint_name(con.name)
        duals[family].add(component)
    return {
        "variable": {k: sorted(v) for k, v in sorted(variables.items())},
        "parameter": {k: sorted(v) for k, v in sorted(parameters.items())},
        "dual": {k: sorted(v) for k, v in sorted(duals.items())},
    }
