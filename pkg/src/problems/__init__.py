"""
Problems Module

Decision and emulation models: a container built once from a template plus
timing metadata, with the per-execution update and solve lifecycle.
"""

from src.problems.decision import (
    DecisionModel,
    build_decision_model,
    solve_decision_model,
    update_decision_model,
    update_forecast_params,
)
from src.problems.emulation import (
    RETRY_SLACK_CAP,
    EmulationModel,
    build_emulation_model,
    run_emulation_step,
)
from src.problems.errors import ModelSolveError, StaleStateError
from src.problems.solution import (
    DecisionSolution,
    EmulationSolution,
    ModelSolution,
    collect_trajectories,
    layout_components,
)

__all__ = [
    "DecisionModel",
    "DecisionSolution",
    "EmulationModel",
    "EmulationSolution",
    "ModelSolution",
    "ModelSolveError",
    "RETRY_SLACK_CAP",
    "StaleStateError",
    "build_decision_model",
    "build_emulation_model",
    "collect_trajectories",
    "layout_components",
    "run_emulation_step",
    "solve_decision_model",
    "update_decision_model",
    "update_forecast_params",
]
