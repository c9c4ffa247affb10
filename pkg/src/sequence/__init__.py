"""
Sequence Module

Timing validation, execution order and initial-condition chronologies of a
simulation, plus the preallocated simulation state.
"""

from src.sequence.chronology import (
    DECISION,
    EMULATION,
    get_initial_conditions,
    initial_conditions_snapshot,
    update_state,
)
from src.sequence.errors import ColdStartError, SequenceValidationError, StateError, TimingError
from src.sequence.order import Execution, ExecutionOrder, compute_execution_order
from src.sequence.sequence import (
    CHRONOLOGIES,
    INTER_PROBLEM,
    INTRA_PROBLEM,
    SimulationSequence,
)
from src.sequence.state import SimulationState, StateSeries
from src.sequence.timing import (
    SimulationSpan,
    check_model_timing,
    format_duration,
    grid_resolution,
)
from src.sequence.validation import ValidationReport, issue_times, validate_sequence

__all__ = [
    "CHRONOLOGIES",
    "ColdStartError",
    "DECISION",
    "EMULATION",
    "Execution",
    "ExecutionOrder",
    "INTER_PROBLEM",
    "INTRA_PROBLEM",
    "SequenceValidationError",
    "SimulationSequence",
    "SimulationSpan",
    "SimulationState",
    "StateError",
    "StateSeries",
    "TimingError",
    "ValidationReport",
    "check_model_timing",
    "compute_execution_order",
    "format_duration",
    "get_initial_conditions",
    "grid_resolution",
    "initial_conditions_snapshot",
    "issue_times",
    "update_state",
    "validate_sequence",
]
