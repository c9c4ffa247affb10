"""SimulationSequence: the ordered models of a simulation and how they couple."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import timedelta
from typing import Any, Protocol

from src.feedforwards.specs import FeedforwardSpec

INTER_PROBLEM = "InterProblemChronology"
INTRA_PROBLEM = "IntraProblemChronology"
CHRONOLOGIES = (INTER_PROBLEM, INTRA_PROBLEM)


class TimedModel(Protocol):
    name: str
    horizon_steps: int
    resolution: timedelta
    interval: timedelta


@dataclass
class SimulationSequence:
    """Decision models ordered outermost first, plus an optional emulator.

    Attributes:
        models: Decision models; each interval divides the previous one.
        emulator: Single-step model producing the system state, or None.
        feedforwards: Couplings between models.
        chronology: Default initial-condition chronology of decision models.
    """

    models: list[Any]
    emulator: Any | None = None
    feedforwards: list[FeedforwardSpec] = field(default_factory=list)
    chronology: str = INTER_PROBLEM

    def chronology_for(self, model: Any) -> str:
        return getattr(model, "chronology", None) or self.chronology

    @property
    def model_names(self) -> list[str]:
        names = [m.name for m in self.models]
        if self.emulator is not None:
            names.append(self.emulator.name)
        return names

    def get_model(self, name: str) -> Any:
        for model in self.all_models:
            if model.name == name:
                return model
        raise KeyError(f"Model '{name}' not in sequence")

    @property
    def all_models(self) -> list[Any]:
        return [*self.models, *([self.emulator] if self.emulator is not None else [])]

    @property
    def outermost(self) -> Any:
        return self.models[0]

    @property
    def innermost(self) -> Any:
        return self.models[-1]

    @property
    def state_writer(self) -> Any:
        """The model whose solutions define the system state."""
        return self.emulator if self.emulator is not None else self.innermost

    def feedforwards_into(self, name: str) -> list[FeedforwardSpec]:
        return [f for f in self.feedforwards if f.target == name]

    def rank(self, name: str) -> int:
        return self.model_names.index(name)
