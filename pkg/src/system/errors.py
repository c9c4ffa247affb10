"""Errors raised while loading, validating, and querying system data."""

from __future__ import annotations

from src.errors import OpsimError


class SystemValidationError(OpsimError, ValueError):
    """Raised when a system descriptor violates the schema or an invariant."""


class TimeSeriesError(OpsimError, ValueError):
    """Base class for time-series lookup failures."""


class ForecastNotFoundError(TimeSeriesError):
    """No forecast registered for the requested (component, label)."""


class IssueTimeNotFoundError(TimeSeriesError):
    """The requested issue time is not one of the forecast's issue times."""


class HorizonOverrunError(TimeSeriesError):
    """More steps were requested than the stored window holds."""


class RealizationNotFoundError(TimeSeriesError):
    """No realization series registered for the requested (component, label)."""


class OutOfRangeError(TimeSeriesError):
    """Timestamp lies outside the realization series."""


class OffGridError(TimeSeriesError):
    """Timestamp does not fall on the series resolution grid."""
