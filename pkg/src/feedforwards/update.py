"""Refresh feedforward parameters from the simulation state."""

from __future__ import annotations

import logging
import math
from datetime import datetime, timedelta
from typing import Protocol

from src.optimization.container import OptimizationContainer
from src.optimization.keys import ParameterKind, ParamKey
from src.system.system import SystemModel

from .errors import FeedforwardGapError
from .specs import SEMI_CONTINUOUS, FeedforwardSpec

logger = logging.getLogger(__name__)


class DecisionReader(Protocol):
    def read_decision(self, model: str, kind: str, component: str, at: datetime) -> float: ...


class FeedforwardTarget(Protocol):
    name: str
    system: SystemModel
    container: OptimizationContainer
    resolution: timedelta
    feedforwards: list[FeedforwardSpec]


def update_feedforward_params(model: FeedforwardTarget, state: DecisionReader, issue_time: datetime) -> int:
    """Set every feedforward parameter of ``model`` for an execution at ``issue_time``.

    Target step τ covers ``[issue_time + (τ−1)·Δt, issue_time + τ·Δt)`` and
    takes the source value in force at its start (zero-order hold).
    Commitment statuses are rounded to 0/1 and followed by the start and stop
    allowances they imply. Returns the number of updated parameters.

    Raises:
        FeedforwardGapError: If no source value covers a target step.
    """
    updated = 0
    for spec in model.feedforwards:
        components = set(spec.resolve_components(model.system))
        for key in model.container.parameters_of_kind(spec.parameter_kind):
            if key.component not in components:
                continue
            at = issue_time + (key.t - 1) * model.resolution
            value = state.read_decision(spec.source, spec.source_variable, key.component, at)
            if math.isnan(value):
                raise FeedforwardGapError(
                    f"no {spec.source_variable} value from '{spec.source}' for '{key.component}' "
                    f"covering {at.isoformat()} (feeding '{model.name}')"
                )
            if spec.kind == SEMI_CONTINUOUS:
                value = 1.0 if value > 0.5 else 0.0
            model.container.update_parameter(key, value)
            updated += 1
    updated += refresh_transition_allowances(model.container)
    logger.debug("Updated %d feedforward parameters of '%s' at %s", updated, model.name, issue_time)
    return updated


def _status_before(container: OptimizationContainer, component: str, t: int) -> float:
    if t > 1:
        return container.parameter_value(ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, component, t - 1))
    initial = ParamKey(ParameterKind.INITIAL_ON_STATUS, component, 0)
    if container.has_parameter(initial):
        return container.parameter_value(initial)
    return container.parameter_value(ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, component, t))


def refresh_transition_allowances(container: OptimizationContainer) -> int:
    """Set start allowances to ``max(0, v_τ − v_{τ−1})`` and stop allowances to ``max(0, v_{τ−1} − v_τ)``.

    ``v_0`` is the initial on-status of the container. Returns the count.
    """
    updated = 0
    for kind, rising in (
        (ParameterKind.FEEDFORWARD_START_ALLOWANCE, True),
        (ParameterKind.FEEDFORWARD_STOP_ALLOWANCE, False),
    ):
        for key in container.parameters_of_kind(kind):
            now = container.parameter_value(ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, key.component, key.t))
            before = _status_before(container, key.component, key.t)
            change = now - before if rising else before - now
            container.update_parameter(key, max(0.0, change))
            updated += 1
    return updated
