"""Simulation build: validate, build every model once, initialize the state."""

from __future__ import annotations

import json
import logging
import time
from datetime import datetime

import numpy as np

from src.formulations.errors import BuildError
from src.formulations.initial import (
    apply_initial_conditions,
    descriptor_initial_conditions,
    placeholder_initial_conditions,
)
from src.formulations.network import PTDFMatrix, compute_ptdf
from src.formulations.template import PTDF_DC_POWER
from src.optimization.keys import VariableKind
from src.optimization.serialization import serialize
from src.problems.decision import DecisionModel, build_decision_model, update_forecast_params
from src.problems.emulation import build_emulation_model
from src.problems.solution import collect_trajectories
from src.sequence.order import compute_execution_order
from src.sequence.sequence import SimulationSequence
from src.sequence.state import SimulationState
from src.sequence.timing import SimulationSpan, grid_resolution
from src.sequence.validation import validate_sequence
from src.system.components import InitialConditions
from src.system.system import SystemModel

from .errors import SimulationError
from .simulation import Simulation, SimulationStatus

logger = logging.getLogger(__name__)

CONTAINERS_DIR = "containers"
RESOLVED_CONFIG = "config_resolved.json"


def relaxed_initial_conditions(
    model: DecisionModel, start: datetime, known: InitialConditions
) -> InitialConditions:
    """Complete ``known`` from a penalized LP relaxation of ``model`` at ``start``.

    Missing thermal states take the rounded first-step commitment and output;
    they count as settled for longer than any minimum time. Missing storage
    states take the first-step state of charge.

    Raises:
        SimulationError: If the relaxation has no optimal point.
    """
    system: SystemModel = model.system
    update_forecast_params(model, start)
    apply_initial_conditions(
        model.container, system, placeholder_initial_conditions(system), model.horizon_steps, model.dt
    )
    result = model.solver.relax_and_solve(model.container)
    if not result.is_optimal:
        raise SimulationError(f"relaxed initialization of '{model.name}' ended {result.status.value}")
    trajectories = collect_trajectories(model.container, result.primal, system, model.horizon_steps)
    ic = InitialConditions(
        on_status=dict(known.on_status),
        power=dict(known.power),
        duration=dict(known.duration),
        soc=dict(known.soc),
    )
    for gen in system.components_of_type("ThermalGen"):
        if gen.name in ic.on_status and gen.name in ic.power and gen.name in ic.duration:
            continue
        status = trajectories.get((VariableKind.ON_STATUS, gen.name))
        power = trajectories.get((VariableKind.ACTIVE_POWER, gen.name))
        on = bool(status is not None and status[0] > 0.5)
        ic.on_status[gen.name] = on
        ic.power[gen.name] = float(np.clip(power[0], gen.p_min, gen.p_max)) if on and power is not None else 0.0
        ic.duration[gen.name] = float(max(gen.min_up, gen.min_down))
    for unit in system.components_of_type("Storage"):
        if unit.name in ic.soc:
            continue
        soc = trajectories.get((VariableKind.SOC, unit.name))
        ic.soc[unit.name] = float(np.clip(soc[0], 0.0, unit.energy_capacity)) if soc is not None else 0.0
    logger.info("Relaxed initialization of '%s' completed the initial conditions", model.name)
    return ic


def _needs_ptdf(sim: Simulation) -> bool:
    templates = [m.template for m in sim.models]
    if sim.emulator is not None:
        templates.append(sim.emulator.template)
    return any(t.network == PTDF_DC_POWER for t in templates)


def build_simulation(sim: Simulation) -> Simulation:
    """Validate the sequence, build each model once and preallocate the state.

    Raises:
        SequenceValidationError: On timing, data or wiring violations; nothing
            is built.
        SimulationError: On a model build failure, naming the model.
    """
    if sim.status is not SimulationStatus.CREATED:
        raise SimulationError(f"simulation is already {sim.status.value}")
    started = time.perf_counter()
    definitions = sim.definition_sequence()
    if not sim.models:
        raise SimulationError("simulation has no decision models")
    sim.span = SimulationSpan(sim.start, sim.steps, sim.models[0].interval)
    try:
        sim.report = validate_sequence(definitions, sim.system, sim.span)
    except Exception:
        sim.advance(SimulationStatus.FAILED)
        raise

    sim.output_dir.mkdir(parents=True, exist_ok=True)
    if sim.resolved_config is not None:
        (sim.output_dir / RESOLVED_CONFIG).write_text(
            json.dumps(sim.resolved_config, indent=2, sort_keys=True), encoding="utf-8"
        )
    ptdf: PTDFMatrix | None = compute_ptdf(sim.system) if _needs_ptdf(sim) else None

    models = []
    try:
        for definition in sim.models:
            models.append(
                build_decision_model(
                    definition.name,
                    definition.template,
                    sim.system,
                    definition.horizon_steps,
                    definition.resolution,
                    definition.interval,
                    feedforwards=definitions.feedforwards_into(definition.name),
                    solver_options=definition.solver,
                    chronology=definition.chronology,
                    ptdf=ptdf,
                )
            )
            sim.container_builds += 1
        emulator = None
        if sim.emulator is not None:
            emulator = build_emulation_model(
                sim.emulator.name,
                sim.emulator.template,
                sim.system,
                sim.emulator.resolution,
                feedforwards=definitions.feedforwards_into(sim.emulator.name),
                solver_options=sim.emulator.solver,
                ptdf=ptdf,
            )
            sim.container_builds += 1
    except BuildError as exc:
        sim.advance(SimulationStatus.FAILED)
        failed = sim.models[len(models)].name if len(models) < len(sim.models) else sim.emulator.name
        raise SimulationError(f"building model '{failed}' failed: {exc}") from exc

    sim.sequence = SimulationSequence(
        models=models, emulator=emulator, feedforwards=list(sim.feedforwards), chronology=sim.chronology
    )
    containers = sim.output_dir / CONTAINERS_DIR
    containers.mkdir(parents=True, exist_ok=True)
    for model in sim.sequence.all_models:
        serialize(model.container, containers / f"{model.name}.json")

    ic = descriptor_initial_conditions(sim.system)
    if not sim.system.has_complete_initial_conditions:
        ic = relaxed_initial_conditions(models[0], sim.start, ic)
        sim.relaxed_initializations += 1

    durations = [d for m in sim.sequence.all_models for d in (m.resolution, m.interval)]
    longest = max(m.horizon_steps * m.resolution for m in sim.sequence.all_models)
    sim.state = SimulationState(sim.start, grid_resolution(durations), sim.span.end + longest)
    sim.state.set_initial(ic, sim.sequence.model_names)
    sim.order = compute_execution_order(sim.sequence, sim.span)
    sim.advance(SimulationStatus.BUILT)
    logger.info(
        "Simulation built in %.2fs: %d containers, %d executions over %d steps (%s)",
        time.perf_counter() - started,
        sim.container_builds,
        len(sim.order),
        sim.steps,
        ", ".join(f"{k}: {v}" for k, v in sim.order.counts().items()),
    )
    return sim
