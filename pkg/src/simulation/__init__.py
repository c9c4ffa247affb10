"""
Simulation Module

Top-level driver: builds every model of a simulation once, runs the
execution order through update, solve, store and state, and reads the
results back.
"""

from src.simulation.build import build_simulation, relaxed_initial_conditions
from src.simulation.errors import SimulationError, SimulationStateError
from src.simulation.execute import execute_simulation, result_layouts, run_simulation
from src.simulation.results import SimulationResults, load_results
from src.simulation.simulation import (
    HALT,
    SKIP_AND_CARRY,
    EmulatorDefinition,
    ModelDefinition,
    Simulation,
    SimulationStatus,
    simulation_from_config,
)

__all__ = [
    "EmulatorDefinition",
    "HALT",
    "ModelDefinition",
    "SKIP_AND_CARRY",
    "Simulation",
    "SimulationError",
    "SimulationResults",
    "SimulationStateError",
    "SimulationStatus",
    "build_simulation",
    "execute_simulation",
    "load_results",
    "relaxed_initial_conditions",
    "result_layouts",
    "run_simulation",
    "simulation_from_config",
]
