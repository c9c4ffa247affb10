"""SimulationState: decision trajectories u and the system state x.

Both keyspaces share one fine timeline. Slot 0 holds the value before the
simulation start; slot ``i ≥ 1`` covers ``[start + (i−1)·Δ, start + i·Δ)``.
Decision values are zero-order held onto the slots their step covers.
Each decision key keeps two layers: the realized trajectory, written only
from steps inside the model's interval, and a look-ahead layer with the
latest unrealized values. Every realized slot records which execution and
horizon step wrote it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from src.system.components import InitialConditions

from .errors import StateError
from .timing import format_duration

logger = logging.getLogger(__name__)

DecisionKey = tuple[str, str, str]  # model, variable kind, component
SystemKey = tuple[str, str]  # variable kind, component


@dataclass
class StateSeries:
    """Values of one key on the fine timeline."""

    values: np.ndarray
    writer: np.ndarray
    horizon_step: np.ndarray
    lookahead: np.ndarray
    lookahead_step: np.ndarray

    @classmethod
    def allocate(cls, n_slots: int) -> "StateSeries":
        return cls(
            values=np.full(n_slots, np.nan),
            writer=np.full(n_slots, -1, dtype=np.int64),
            horizon_step=np.zeros(n_slots, dtype=np.int64),
            lookahead=np.full(n_slots, np.nan),
            lookahead_step=np.zeros(n_slots, dtype=np.int64),
        )

    def read(self, slot: int, include_lookahead: bool = True) -> float:
        value = self.values[slot]
        if math.isnan(value) and include_lookahead:
            value = self.lookahead[slot]
        return float(value)


class SimulationState:
    """Preallocated state of a simulation.

    Args:
        start: Simulation start.
        resolution: Fine grid spacing shared by every model.
        end: Last instant any write may reach (span end plus the longest
            decision horizon).
    """

    def __init__(self, start: datetime, resolution: timedelta, end: datetime):
        if resolution <= timedelta(0):
            raise StateError("state resolution must be positive")
        self.start = start
        self.resolution = resolution
        self.n_slots = 1 + -(-(end - start) // resolution)
        self._decisions: dict[DecisionKey, StateSeries] = {}
        self._system: dict[SystemKey, StateSeries] = {}
        self.initial_conditions = InitialConditions()
        self.writes = 0

    # -------------
    # Timeline
    # -------------

    def slot(self, at: datetime) -> int:
        """Slot covering ``at``.

        Raises:
            StateError: Off the fine grid or outside the timeline.
        """
        offset, remainder = divmod(at - self.start, self.resolution)
        if remainder:
            raise StateError(
                f"timestamp {at.isoformat()} is off the {format_duration(self.resolution)} state grid"
            )
        index = offset + 1
        if not 0 <= index < self.n_slots:
            raise StateError(f"timestamp {at.isoformat()} outside the simulation state timeline")
        return index

    def time_of(self, slot: int) -> datetime:
        return self.start + (slot - 1) * self.resolution

    def _span(self, begin: datetime, length: timedelta) -> tuple[int, int]:
        first = self.slot(begin)
        return first, min(self.n_slots, first + length // self.resolution)

    # -------------
    # Keys
    # -------------

    def allocate_decision(self, model: str, kind: str, components: list[str]) -> None:
        for component in components:
            self._decisions.setdefault((model, kind, component), StateSeries.allocate(self.n_slots))

    def allocate_system(self, kind: str, components: list[str]) -> None:
        for component in components:
            self._system.setdefault((kind, component), StateSeries.allocate(self.n_slots))

    def decision_keys(self) -> list[DecisionKey]:
        return sorted(self._decisions)

    def system_keys(self) -> list[SystemKey]:
        return sorted(self._system)

    def decision_series(self, model: str, kind: str, component: str) -> StateSeries:
        try:
            return self._decisions[(model, kind, component)]
        except KeyError:
            raise StateError(f"no decision state for {model}/{kind}/{component}") from None

    def system_series(self, kind: str, component: str) -> StateSeries:
        try:
            return self._system[(kind, component)]
        except KeyError:
            raise StateError(f"no system state for {kind}/{component}") from None

    # -------------
    # Writes
    # -------------

    def set_initial(self, ic: InitialConditions, models: list[str]) -> None:
        """Write the pre-start values into slot 0 of x and of every model's u."""
        self.initial_conditions = ic
        values: dict[SystemKey, float] = {}
        for name, on in ic.on_status.items():
            values[("OnStatus", name)] = 1.0 if on else 0.0
            values[("ActivePower", name)] = ic.power.get(name, 0.0)
        for name, soc in ic.soc.items():
            values[("SoC", name)] = soc
        for (kind, component), value in values.items():
            self.allocate_system(kind, [component])
            self._system[(kind, component)].values[0] = value
            for model in models:
                self.allocate_decision(model, kind, [component])
                self._decisions[(model, kind, component)].values[0] = value

    def write_decision(
        self,
        model: str,
        kind: str,
        component: str,
        issue_time: datetime,
        resolution: timedelta,
        values: np.ndarray,
        realized_steps: int,
        execution: int,
    ) -> None:
        """Store one trajectory; steps past ``realized_steps`` go to the look-ahead layer."""
        self.allocate_decision(model, kind, [component])
        series = self._decisions[(model, kind, component)]
        for tau, value in enumerate(values, start=1):
            begin = issue_time + (tau - 1) * resolution
            if self.slot_or_none(begin) is None:
                break
            first, last = self._span(begin, resolution)
            if tau <= realized_steps:
                series.values[first:last] = value
                series.writer[first:last] = execution
                series.horizon_step[first:last] = tau
            else:
                series.lookahead[first:last] = value
                series.lookahead_step[first:last] = tau
        self.writes += 1

    def write_system(
        self, kind: str, component: str, at: datetime, resolution: timedelta, value: float, execution: int
    ) -> None:
        self.allocate_system(kind, [component])
        series = self._system[(kind, component)]
        first, last = self._span(at, resolution)
        series.values[first:last] = value
        series.writer[first:last] = execution
        series.horizon_step[first:last] = 1
        self.writes += 1

    def promote_lookahead(self, model: str, begin: datetime, length: timedelta, execution: int) -> int:
        """Move look-ahead values of ``model`` over ``[begin, begin+length)`` into the realized layer."""
        first, last = self._span(begin, length)
        promoted = 0
        for (name, _, _), series in self._decisions.items():
            if name != model:
                continue
            window = slice(first, last)
            available = ~np.isnan(series.lookahead[window])
            series.values[window][available] = series.lookahead[window][available]
            series.writer[window][available] = execution
            series.horizon_step[window][available] = series.lookahead_step[window][available]
            promoted += int(available.sum())
        return promoted

    def slot_or_none(self, at: datetime) -> int | None:
        try:
            return self.slot(at)
        except StateError:
            return None

    # -------------
    # Reads
    # -------------

    def read_decision(self, model: str, kind: str, component: str, at: datetime) -> float:
        """Value of ``model``'s decision in force at ``at``; NaN when unknown."""
        series = self._decisions.get((model, kind, component))
        slot = self.slot_or_none(at)
        if series is None or slot is None:
            return math.nan
        return series.read(slot)

    def read_system(self, kind: str, component: str, at: datetime) -> float:
        series = self._system.get((kind, component))
        slot = self.slot_or_none(at)
        if series is None or slot is None:
            return math.nan
        return series.read(slot, include_lookahead=False)

    def status_duration(self, series: StateSeries, slot: int, component: str) -> float:
        """Hours the status read at ``slot`` has been held, counting back to slot 0."""
        status = series.values[slot]
        held = 0
        index = slot
        while index >= 1 and series.values[index] == status:
            held += 1
            index -= 1
        hours = held * self.resolution.total_seconds() / 3600.0
        if index == 0 and series.values[0] == status:
            initial = self.initial_conditions.duration.get(component)
            hours += initial if initial is not None else 0.0
        return hours

    def realized_horizon_steps(self, model: str) -> int:
        """Largest horizon step found anywhere in ``model``'s realized trajectories."""
        steps = [int(s.horizon_step.max()) for (name, _, _), s in self._decisions.items() if name == model]
        return max(steps, default=0)

    def snapshot(self) -> dict:
        """JSON-compatible dump of every realized value, for diagnostics."""

        def _values(series: StateSeries) -> list:
            return [None if math.isnan(v) else v for v in series.values.tolist()]

        return {
            "start": self.start.isoformat(),
            "resolution": format_duration(self.resolution),
            "decisions": {"/".join(k): _values(s) for k, s in sorted(self._decisions.items())},
            "system": {"/".join(k): _values(s) for k, s in sorted(self._system.items())},
        }
