"""Errors raised by the results store."""

from __future__ import annotations

from src.errors import OpsimError


class StoreError(OpsimError):
    """Invalid store operation or unreadable store file."""


class StoreConfigError(StoreError, ValueError):
    """Store settings outside their allowed range."""


class LayoutFrozenError(StoreError):
    """A layout change was attempted after the first write."""


class UnknownResultError(StoreError, KeyError):
    """No result registered or written under the requested key."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""
