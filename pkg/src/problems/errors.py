"""Errors raised by decision and emulation models."""

from __future__ import annotations

from datetime import datetime

from src.errors import OpsimError


class StaleStateError(OpsimError, ValueError):
    """A model was asked to execute at a time before its previous execution."""


class ModelSolveError(OpsimError):
    """A model did not reach an optimal solution.

    Attributes:
        model: Model name.
        status: Solver status value.
        issue_time: Execution time of the failed solve.
    """

    def __init__(self, model: str, status: str, issue_time: datetime | None, detail: str = ""):
        self.model = model
        self.status = status
        self.issue_time = issue_time
        when = f" at {issue_time.isoformat()}" if issue_time else ""
        message = f"model '{model}' ended {status}{when}"
        super().__init__(f"{message}: {detail}" if detail else message)
