"""Errors raised while building or executing a simulation."""

from __future__ import annotations

from src.errors import OpsimError


class SimulationError(OpsimError):
    """A simulation could not be built, executed or loaded.

    Attributes:
        diagnostics: Directory with the failure dump, when one was written.
    """

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class SimulationStateError(SimulationError, ValueError):
    """An operation was requested in the wrong simulation status."""
