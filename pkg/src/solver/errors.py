"""Errors raised by the solver layer."""

from __future__ import annotations

from src.errors import OpsimError


class SolverError(OpsimError):
    """The engine could not produce a usable answer (e.g. unbounded relaxation)."""
