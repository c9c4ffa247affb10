"""
Feedforwards Module

Couplings that carry one model's solution into another model's constraints:
semicontinuous commitment bounds, upper and lower bounds, and end-of-horizon
energy targets.
"""

from src.feedforwards.attach import (
    attach_bound,
    attach_energy_target,
    attach_feedforward,
    attach_semicontinuous,
)
from src.feedforwards.errors import FeedforwardError, FeedforwardGapError
from src.feedforwards.specs import (
    ENERGY_TARGET,
    LOWER_BOUND,
    SEMI_CONTINUOUS,
    UPPER_BOUND,
    FeedforwardSpec,
)
from src.feedforwards.update import refresh_transition_allowances, update_feedforward_params

__all__ = [
    "ENERGY_TARGET",
    "FeedforwardError",
    "FeedforwardGapError",
    "FeedforwardSpec",
    "LOWER_BOUND",
    "SEMI_CONTINUOUS",
    "UPPER_BOUND",
    "attach_bound",
    "attach_energy_target",
    "attach_feedforward",
    "attach_semicontinuous",
    "refresh_transition_allowances",
    "update_feedforward_params",
]
