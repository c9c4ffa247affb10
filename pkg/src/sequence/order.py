"""Precomputed execution order of a simulation."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from typing import Iterator

from .sequence import SimulationSequence
from .timing import SimulationSpan


@dataclass(frozen=True, order=True)
class Execution:
    """One solve: ``model`` issued at ``issue_time`` within simulation ``step``.

    Ordering is by time, then rank (outer models before inner ones, the
    emulator last).
    """

    issue_time: datetime
    rank: int
    model: str
    step: int
    emulation: bool = False


@dataclass
class ExecutionOrder:
    """Executions grouped by 1-based simulation step."""

    steps: list[list[Execution]]

    def __iter__(self) -> Iterator[Execution]:
        for executions in self.steps:
            yield from executions

    def __len__(self) -> int:
        return sum(len(s) for s in self.steps)

    def for_step(self, step: int) -> list[Execution]:
        return self.steps[step - 1]

    def counts(self) -> dict[str, int]:
        return dict(Counter(e.model for e in self))


def compute_execution_order(seq: SimulationSequence, span: SimulationSpan) -> ExecutionOrder:
    """Interleave all executions chronologically.

    Model ``k`` runs at ``start + s·I_1 + j·I_k`` for ``j < I_1/I_k``; the
    emulator ticks at every multiple of its resolution. At equal timestamps
    outer models run first and the emulator runs after every decision due
    at that time.
    """
    outer = seq.outermost.interval
    emulator_rank = len(seq.models)
    steps = []
    for step in range(1, span.steps + 1):
        step_start = span.step_start(step)
        executions = [
            Execution(step_start + j * model.interval, rank, model.name, step)
            for rank, model in enumerate(seq.models)
            for j in range(outer // model.interval)
        ]
        if seq.emulator is not None:
            executions += [
                Execution(step_start + j * seq.emulator.resolution, emulator_rank, seq.emulator.name, step, True)
                for j in range(outer // seq.emulator.resolution)
            ]
        steps.append(sorted(executions))
    return ExecutionOrder(steps)
