"""Errors raised by the optimization container."""

from __future__ import annotations

from src.errors import OpsimError


class ContainerError(OpsimError, ValueError):
    """Invalid variable, constraint or objective operation on a container."""


class ParameterError(ContainerError):
    """Unknown parameter key or invalid parameter value."""
