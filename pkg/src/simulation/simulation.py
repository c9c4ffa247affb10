"""Simulation: model definitions, lifecycle status and construction from config."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path
from typing import Any

from src.config.manager import ConfigManager
from src.feedforwards.specs import FeedforwardSpec
from src.formulations.template import ProblemTemplate
from src.sequence.order import ExecutionOrder
from src.sequence.sequence import INTER_PROBLEM, SimulationSequence
from src.sequence.state import SimulationState
from src.sequence.timing import SimulationSpan
from src.sequence.validation import ValidationReport
from src.solver.types import SolverOptions
from src.store.keys import StoreConfig
from src.system.loader import load_system
from src.system.system import SystemModel

from .errors import SimulationStateError

logger = logging.getLogger(__name__)

HALT = "halt"
SKIP_AND_CARRY = "skip_and_carry"
POLICIES = (HALT, SKIP_AND_CARRY)


class SimulationStatus(str, Enum):
    CREATED = "created"
    BUILT = "built"
    RUNNING = "running"
    FINISHED = "finished"
    FAILED = "failed"


_ORDER = [SimulationStatus.CREATED, SimulationStatus.BUILT, SimulationStatus.RUNNING, SimulationStatus.FINISHED]


@dataclass(frozen=True)
class ModelDefinition:
    """Decision model before it is built."""

    name: str
    template: ProblemTemplate
    horizon_steps: int
    resolution: timedelta
    interval: timedelta
    chronology: str | None = None
    solver: SolverOptions = field(default_factory=SolverOptions)


@dataclass(frozen=True)
class EmulatorDefinition:
    name: str
    template: ProblemTemplate
    resolution: timedelta
    solver: SolverOptions = field(default_factory=SolverOptions)

    horizon_steps = 1

    @property
    def interval(self) -> timedelta:
        return self.resolution


@dataclass
class Simulation:
    """One simulation: what to run, where to write, and its runtime objects.

    Attributes:
        system: The power system.
        models: Decision model definitions, outermost first.
        emulator: Emulator definition, or None.
        feedforwards: Couplings between models.
        start: First simulated instant.
        steps: Number of outermost intervals to simulate.
        output_dir: Root of ``containers/``, ``store/``, ``logs/``.
        store_config: Results store settings.
        chronology: Default initial-condition chronology.
        on_infeasible: ``"halt"`` or ``"skip_and_carry"``.
        resolved_config: Document written as ``config_resolved.json``.
    """

    system: SystemModel
    models: list[ModelDefinition]
    emulator: EmulatorDefinition | None
    start: datetime
    steps: int
    output_dir: Path
    feedforwards: list[FeedforwardSpec] = field(default_factory=list)
    store_config: StoreConfig = field(default_factory=StoreConfig)
    chronology: str = INTER_PROBLEM
    on_infeasible: str = HALT
    resolved_config: dict[str, Any] | None = None

    status: SimulationStatus = SimulationStatus.CREATED
    span: SimulationSpan | None = None
    report: ValidationReport | None = None
    sequence: SimulationSequence | None = None
    state: SimulationState | None = None
    order: ExecutionOrder | None = None
    container_builds: int = 0
    relaxed_initializations: int = 0
    solves: int = 0
    skipped: int = 0

    def __post_init__(self) -> None:
        self.output_dir = Path(self.output_dir)
        if self.on_infeasible not in POLICIES:
            raise ValueError(f"unknown infeasibility policy '{self.on_infeasible}'")

    def definition_sequence(self) -> SimulationSequence:
        """Sequence of unbuilt definitions, for validation."""
        return SimulationSequence(
            models=list(self.models),
            emulator=self.emulator,
            feedforwards=list(self.feedforwards),
            chronology=self.chronology,
        )

    def advance(self, status: SimulationStatus) -> None:
        """Move to ``status``; only forward transitions are allowed."""
        if status is SimulationStatus.FAILED:
            if self.status in (SimulationStatus.FINISHED, SimulationStatus.FAILED):
                raise SimulationStateError(f"cannot fail a simulation that is {self.status.value}")
        elif self.status is SimulationStatus.FAILED or _ORDER.index(status) != _ORDER.index(self.status) + 1:
            raise SimulationStateError(f"cannot go from {self.status.value} to {status.value}")
        logger.debug("Simulation status %s -> %s", self.status.value, status.value)
        self.status = status


def simulation_from_config(manager: ConfigManager) -> Simulation:
    """Load the system and turn a validated config into an unbuilt ``Simulation``."""
    config = manager.config
    system = load_system(config.system_path)
    models = [
        ModelDefinition(
            name=m.name,
            template=ProblemTemplate.from_mapping(m.template),
            horizon_steps=m.horizon,
            resolution=m.resolution,
            interval=m.interval,
            chronology=m.chronology,
            solver=SolverOptions.from_mapping(m.solver),
        )
        for m in config.models
    ]
    emulator = None
    if config.emulator is not None:
        emulator = EmulatorDefinition(
            name=config.emulator.name,
            template=ProblemTemplate.from_mapping(config.emulator.template),
            resolution=config.emulator.resolution,
            solver=SolverOptions.from_mapping(config.emulator.solver),
        )
    return Simulation(
        system=system,
        models=models,
        emulator=emulator,
        start=config.start,
        steps=config.steps,
        output_dir=config.output_dir,
        feedforwards=[FeedforwardSpec.from_mapping(f) for f in config.feedforwards],
        store_config=StoreConfig.from_mapping(config.store),
        chronology=config.chronology,
        on_infeasible=config.on_infeasible,
        resolved_config=manager.resolved(),
    )
