"""Keys identifying variables, parameters and expressions in a container."""

from __future__ import annotations

from dataclasses import dataclass


class VariableKind:
    ACTIVE_POWER = "ActivePower"
    ON_STATUS = "OnStatus"
    START_UP = "StartUp"
    SHUT_DOWN = "ShutDown"
    PWL_COST = "PieceWiseLinearCost"
    RESERVE = "Reserve"
    POWER_IN = "ActivePowerIn"
    POWER_OUT = "ActivePowerOut"
    SOC = "SoC"
    SLACK_UP = "BalanceSlackUp"
    SLACK_DOWN = "BalanceSlackDown"
    ENERGY_SHORTAGE = "EnergyTargetShortage"


class ParameterKind:
    FORECAST_BOUND = "ForecastBound"
    REQUIREMENT = "RequirementRHS"
    FEEDFORWARD_ON_STATUS = "FeedforwardOnStatus"
    FEEDFORWARD_UPPER = "FeedforwardUpperBound"
    FEEDFORWARD_LOWER = "FeedforwardLowerBound"
    FEEDFORWARD_START_ALLOWANCE = "FeedforwardStartAllowance"
    FEEDFORWARD_STOP_ALLOWANCE = "FeedforwardStopAllowance"
    ENERGY_TARGET = "EnergyTarget"
    INITIAL_ON_STATUS = "InitialOnStatus"
    INITIAL_POWER = "InitialPower"
    INITIAL_SOC = "InitialSoC"
    MIN_UP_INITIAL = "MinUpInitial"
    MIN_DOWN_INITIAL = "MinDownInitial"
    SLACK_CAP = "SlackCap"


# Parameters carrying the state of the system before the first step.
INITIAL_CONDITION_KINDS = (
    ParameterKind.INITIAL_ON_STATUS,
    ParameterKind.INITIAL_POWER,
    ParameterKind.INITIAL_SOC,
    ParameterKind.MIN_UP_INITIAL,
    ParameterKind.MIN_DOWN_INITIAL,
)

FEEDFORWARD_KINDS = (
    ParameterKind.FEEDFORWARD_ON_STATUS,
    ParameterKind.FEEDFORWARD_UPPER,
    ParameterKind.FEEDFORWARD_LOWER,
    ParameterKind.FEEDFORWARD_START_ALLOWANCE,
    ParameterKind.FEEDFORWARD_STOP_ALLOWANCE,
    ParameterKind.ENERGY_TARGET,
)


@dataclass(frozen=True, order=True)
class VarKey:
    """Variable identity: kind, owning component and 1-based time index."""

    kind: str
    component: str
    t: int

    def __str__(self) -> str:
        return f"{self.kind}({self.component},{self.t})"


@dataclass(frozen=True, order=True)
class ParamKey:
    """Parameter identity; same layout as ``VarKey``."""

    kind: str
    component: str
    t: int

    def __str__(self) -> str:
        return f"{self.kind}({self.component},{self.t})"


@dataclass(frozen=True, order=True)
class ExpressionKey:
    """Named linear expression, e.g. the power balance of a bus at step t."""

    kind: str
    component: str
    t: int


ACTIVE_POWER_BALANCE = "ActivePowerBalance"


def constraint_name(family: str, component: str, t: int) -> str:
    """Row names follow ``family::component::t`` so duals group by family."""
    return f"{family}::{component}::{t}"


def parse_constraint_name(name: str) -> tuple[str, str, int]:
    family, component, t = name.rsplit("::", 2)
    return family, component, int(t)
