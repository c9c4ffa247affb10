"""Errors raised while building optimization problems."""

from __future__ import annotations

from src.errors import OpsimError


class BuildError(OpsimError, ValueError):
    """A template, system or formulation cannot produce a valid container."""
