"""Errors raised by sequence validation, ordering and state handling."""

from __future__ import annotations

from src.errors import OpsimError


class TimingError(OpsimError, ValueError):
    """Horizon, interval or resolution of a model are inconsistent."""


class SequenceValidationError(OpsimError, ValueError):
    """A simulation sequence violates one or more consistency rules.

    Attributes:
        findings: Every violated rule, one message each.
    """

    def __init__(self, findings: list[str]):
        self.findings = list(findings)
        super().__init__("; ".join(self.findings))


class ColdStartError(OpsimError):
    """The state holds no value to start a model from."""


class StateError(OpsimError, ValueError):
    """A state read or write falls outside the preallocated timeline."""
