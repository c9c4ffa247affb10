"""Errors raised while attaching or updating feedforwards."""

from __future__ import annotations

from src.errors import OpsimError


class FeedforwardError(OpsimError, ValueError):
    """A feedforward cannot be attached to its target model."""


class FeedforwardGapError(FeedforwardError):
    """No source value covers a target step when updating parameters."""
