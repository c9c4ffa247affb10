"""Simulation execution: the update, solve, store and state loop."""

from __future__ import annotations

import json
import logging
import time
from pathlib import Path
from typing import Any

import numpy as np

from src.errors import OpsimError
from src.optimization.keys import VariableKind
from src.optimization.serialization import serialize
from src.problems.decision import solve_decision_model, update_decision_model
from src.problems.emulation import run_emulation_step
from src.problems.errors import ModelSolveError
from src.problems.solution import ModelSolution, layout_components
from src.sequence.chronology import DECISION, EMULATION, update_state
from src.sequence.order import Execution
from src.store.base import ResultStore
from src.store.export import make_store
from src.store.keys import AUXILIARY, DUAL, PARAMETER, VARIABLE, ResultKey, ResultLayout

from .errors import SimulationError, SimulationStateError
from .results import SimulationResults
from .simulation import SKIP_AND_CARRY, Simulation, SimulationStatus

logger = logging.getLogger(__name__)

DIAGNOSTICS_DIR = "diagnostics"
OBJECTIVE = "ObjectiveValue"


def result_layouts(model: Any) -> list[ResultLayout]:
    """Result axes of one built model.

    Variables and parameters always; duals for continuous models; a derived
    ``OnStatus`` for thermal units dispatched without a commitment variable;
    the objective value of every execution.
    """
    axes = layout_components(model.container)
    horizon = model.horizon_steps
    realized = model.interval // model.resolution
    resolution = int(model.resolution.total_seconds())

    def layout(kind: str, name: str, components: list[str], steps: int = horizon) -> ResultLayout:
        return ResultLayout(ResultKey(model.name, kind, name), tuple(components), steps, min(realized, steps), resolution)

    layouts = [layout(VARIABLE, kind, comps) for kind, comps in axes["variable"].items()]
    layouts += [layout(PARAMETER, kind, comps) for kind, comps in axes["parameter"].items()]
    if not model.container.to_standard_form().integrality.any():
        layouts += [layout(DUAL, family, comps) for family, comps in axes["dual"].items()]
    if VariableKind.ON_STATUS not in axes["variable"]:
        thermal = {g.name for g in model.system.components_of_type("ThermalGen")}
        derived = [c for c in axes["variable"].get(VariableKind.ACTIVE_POWER, []) if c in thermal]
        if derived:
            layouts.append(layout(AUXILIARY, VariableKind.ON_STATUS, derived))
    layouts.append(layout(AUXILIARY, OBJECTIVE, ["objective"], steps=1))
    return layouts


def solution_matrix(solution: ModelSolution, layout: ResultLayout) -> np.ndarray:
    key = layout.key
    components = list(layout.components)
    if key.kind in (VARIABLE, AUXILIARY) and key.name != OBJECTIVE:
        return solution.variable_matrix(key.name, components)
    if key.kind == PARAMETER:
        return solution.parameter_matrix(key.name, components)
    if key.kind == DUAL:
        return solution.dual_matrix(key.name, components)
    return np.array([[solution.objective]])


def write_solution(store: ResultStore, layouts: list[ResultLayout], solution: ModelSolution) -> None:
    for layout in layouts:
        store.write_result(layout.key, solution.issue_time, solution_matrix(solution, layout))


def dump_diagnostics(sim: Simulation, model: Any, execution: Execution, error: Exception) -> Path:
    """Write the failing container, the state snapshot and the parameter values."""
    stamp = execution.issue_time.strftime("%Y%m%dT%H%M%S")
    directory = sim.output_dir / DIAGNOSTICS_DIR / f"{model.name}_{stamp}"
    directory.mkdir(parents=True, exist_ok=True)
    serialize(model.container, directory / "container.json")
    (directory / "state.json").write_text(json.dumps(sim.state.snapshot(), indent=1), encoding="utf-8")
    parameters = {str(k): v for k, v in sorted(model.container.parameters.items())}
    (directory / "parameters.json").write_text(json.dumps(parameters, indent=1), encoding="utf-8")
    failure = {
        "model": model.name,
        "issue_time": execution.issue_time.isoformat(),
        "step": execution.step,
        "error": str(error),
        "type": type(error).__name__,
    }
    (directory / "failure.json").write_text(json.dumps(failure, indent=1, sort_keys=True), encoding="utf-8")
    logger.error("Diagnostics for '%s' written to %s", model.name, directory)
    return directory


def _run(sim: Simulation, execution: Execution, index: int) -> ModelSolution | None:
    """One execution; None when skipped under ``skip_and_carry``."""
    seq, state = sim.sequence, sim.state
    model = seq.get_model(execution.model)
    if execution.emulation:
        solution = run_emulation_step(model, execution.issue_time, state, execution=index)
        update_state(state, solution, EMULATION)
        return solution
    update_decision_model(model, execution.issue_time, state, seq.chronology_for(model))
    try:
        solution = solve_decision_model(model, index)
    except ModelSolveError as exc:
        if sim.on_infeasible != SKIP_AND_CARRY:
            raise
        carried = state.promote_lookahead(model.name, execution.issue_time, model.interval, index)
        if not carried:
            raise
        sim.skipped += 1
        logger.warning("%s; carried %d look-ahead values of '%s' forward", exc, carried, model.name)
        return None
    writes_system = seq.emulator is None and model is seq.innermost
    update_state(state, solution, DECISION, writes_system=writes_system)
    return solution


def execute_simulation(sim: Simulation) -> SimulationResults:
    """Run every execution in order and record the results.

    Each decision execution updates forecasts, initial conditions and
    feedforwards, solves, writes its results and updates the state; each
    emulator tick does the same with realized data and writes the system
    state. On failure the simulation is marked failed, diagnostics are
    dumped and the results written so far stay readable.

    Raises:
        SimulationStateError: If the simulation is not built.
        SimulationError: On a failed execution, with ``diagnostics`` set.
    """
    if sim.status is not SimulationStatus.BUILT:
        raise SimulationStateError(f"cannot execute a simulation that is {sim.status.value}")
    sim.advance(SimulationStatus.RUNNING)
    store = make_store(sim.store_config, sim.output_dir)
    layouts = {model.name: result_layouts(model) for model in sim.sequence.all_models}
    store.register_layout([layout for group in layouts.values() for layout in group])

    started = time.perf_counter()
    solve_time = 0.0
    index = 0
    for step, executions in enumerate(sim.order.steps, start=1):
        step_solves = 0
        for execution in executions:
            index += 1
            try:
                solution = _run(sim, execution, index)
            except OpsimError as exc:
                model = sim.sequence.get_model(execution.model)
                diagnostics = dump_diagnostics(sim, model, execution, exc)
                sim.advance(SimulationStatus.FAILED)
                store.close()
                raise SimulationError(
                    f"execution of '{execution.model}' at {execution.issue_time.isoformat()} failed: {exc}",
                    diagnostics,
                ) from exc
            if solution is None:
                continue
            write_solution(store, layouts[execution.model], solution)
            sim.solves += 1
            step_solves += 1
            solve_time += solution.stats.wall_time
            logger.info(
                "Solved '%s' at %s: %s, objective %.6g, %d iterations, %d nodes, %.3fs",
                execution.model,
                execution.issue_time.isoformat(),
                solution.status.value,
                solution.objective,
                solution.stats.iterations,
                solution.stats.nodes,
                solution.stats.wall_time,
            )
        logger.info(
            "Step %d/%d: %d problems solved, %.2fs cumulative solve time, %.2fs elapsed",
            step,
            sim.steps,
            step_solves,
            solve_time,
            time.perf_counter() - started,
        )
    store.close()
    sim.advance(SimulationStatus.FINISHED)
    logger.info(
        "Simulation finished: %d solves (%d skipped), %d store writes, %d file writes",
        sim.solves,
        sim.skipped,
        store.stats.writes,
        store.stats.flushes,
    )
    return SimulationResults(store, sim.output_dir)


def run_simulation(sim: Simulation) -> SimulationResults:
    """Build (when needed) and execute ``sim``."""
    from .build import build_simulation

    if sim.status is SimulationStatus.CREATED:
        build_simulation(sim)
    return execute_simulation(sim)
