"""Network formulations: copper plate and PTDF-based DC power flow."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from src.optimization.container import INF, Expression, LinearConstraint, OptimizationContainer, Sense
from src.optimization.keys import ParameterKind, ParamKey, VariableKind, VarKey, constraint_name
from src.system.components import InitialConditions
from src.system.system import SystemModel

from .base import SLACK_PENALTY, BuildContext, Formulation, balance_key
from .errors import BuildError
from .template import COPPER_PLATE, PTDF_DC_POWER, ProblemTemplate

logger = logging.getLogger(__name__)

SYSTEM = "system"
# PTDF entries below this magnitude are dropped from flow rows.
PTDF_TOLERANCE = 1e-10


@dataclass(frozen=True)
class PTDFMatrix:
    """Line flow sensitivities to bus injections, slack column zero."""

    matrix: np.ndarray
    lines: tuple[str, ...]
    buses: tuple[str, ...]
    slack_bus: str

    def row(self, line: str) -> np.ndarray:
        return self.matrix[self.lines.index(line)]

    def flows(self, injections: np.ndarray) -> np.ndarray:
        """Line flows for a vector of bus net injections in bus order."""
        return self.matrix @ np.asarray(injections, dtype=float)


def incidence_matrix(sys: SystemModel) -> sp.csr_matrix:
    """Line-by-bus incidence, +1 at the sending and -1 at the receiving bus."""
    bus_index = {name: i for i, name in enumerate(sys.buses)}
    rows, cols, data = [], [], []
    for i, line in enumerate(sys.lines.values()):
        rows += [i, i]
        cols += [bus_index[line.from_bus], bus_index[line.to_bus]]
        data += [1.0, -1.0]
    return sp.csr_matrix((data, (rows, cols)), shape=(len(sys.lines), len(sys.buses)))


def check_connected(sys: SystemModel) -> None:
    incidence = incidence_matrix(sys)
    adjacency = abs(incidence).T @ abs(incidence)
    n_components, labels = connected_components(adjacency, directed=False)
    if n_components > 1:
        buses = list(sys.buses)
        islands = defaultdict(list)
        for bus, label in zip(buses, labels):
            islands[int(label)].append(bus)
        detail = "; ".join(", ".join(members) for members in islands.values())
        raise BuildError(f"disconnected network: {n_components} islands ({detail})")


def compute_ptdf(sys: SystemModel, slack_bus: str | None = None) -> PTDFMatrix:
    """PTDF = B_branch · A · inv(B_bus reduced by the slack bus).

    Raises:
        BuildError: If the network is disconnected or ``slack_bus`` unknown.
    """
    slack = slack_bus or sys.slack_bus.name
    buses = tuple(sys.buses)
    if slack not in buses:
        raise BuildError(f"unknown slack bus '{slack}'")
    if not sys.lines:
        raise BuildError("PTDF requires at least one line")
    check_connected(sys)
    A = incidence_matrix(sys)
    susceptance = sp.diags([1.0 / line.reactance for line in sys.lines.values()])
    branch = (susceptance @ A).toarray()
    b_bus = (A.T @ susceptance @ A).toarray()
    keep = [i for i, name in enumerate(buses) if name != slack]
    reduced = b_bus[np.ix_(keep, keep)]
    try:
        # B_bus is symmetric, so solving against the transposed branch matrix
        # gives PTDF^T for the kept columns.
        partial = np.linalg.solve(reduced, branch[:, keep].T).T
    except np.linalg.LinAlgError as exc:
        raise BuildError(f"singular reduced susceptance matrix: {exc}") from None
    matrix = np.zeros((len(sys.lines), len(buses)))
    matrix[:, keep] = partial
    return PTDFMatrix(matrix=matrix, lines=tuple(sys.lines), buses=buses, slack_bus=slack)


def _merge(expressions: list[Expression], weights: list[float] | None = None) -> Expression:
    merged = Expression()
    weights = weights or [1.0] * len(expressions)
    for expr, w in zip(expressions, weights):
        for key, coef in expr.terms.items():
            merged.terms[key] += w * coef
        for key, mult in expr.params.items():
            merged.params[key] += w * mult
        merged.constant += w * expr.constant
    return merged


def _row(name: str, expr: Expression, sense: Sense, limit: float = 0.0) -> LinearConstraint:
    """``expr (sense) limit`` with constants and parameters moved to the right."""
    terms = [(key, coef) for key, coef in sorted(expr.terms.items()) if abs(coef) > PTDF_TOLERANCE]
    params = {key: -mult for key, mult in sorted(expr.params.items()) if mult != 0.0}
    return LinearConstraint(name, terms, sense, limit - expr.constant, params)


class _NetworkFormulation(Formulation):
    balance_family = ""

    def _bus_expressions(self, container: OptimizationContainer, ctx: BuildContext, t: int) -> list[Expression]:
        return [container.expression(balance_key(bus, t)) for bus in ctx.system.buses]

    def add_arguments(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        if not ctx.has_slacks:
            return
        component = self._slack_component(ctx)
        for t in ctx.steps:
            up = VarKey(VariableKind.SLACK_UP, component, t)
            down = VarKey(VariableKind.SLACK_DOWN, component, t)
            container.add_variable(up, 0.0, INF)
            container.add_variable(down, 0.0, INF)
            bus = self._slack_bus(ctx)
            container.add_to_expression(balance_key(bus, t), up, 1.0)
            container.add_to_expression(balance_key(bus, t), down, -1.0)
            if ctx.caps_slacks:
                container.add_parameter(ParamKey(ParameterKind.SLACK_CAP, component, t))

    def _slack_bus(self, ctx: BuildContext) -> str:
        return ctx.system.slack_bus.name

    def _slack_component(self, ctx: BuildContext) -> str:
        return SYSTEM

    def _add_balance(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        for t in ctx.steps:
            total = _merge(self._bus_expressions(container, ctx, t))
            if not total.terms:
                raise BuildError(
                    f"empty balance at step {t}: no device injects into or withdraws from the network"
                )
            container.add_constraint(_row(constraint_name(self.balance_family, SYSTEM, t), total, Sense.EQ))

    def _add_slack_caps(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        if not ctx.caps_slacks:
            return
        component = self._slack_component(ctx)
        for t in ctx.steps:
            cap = ParamKey(ParameterKind.SLACK_CAP, component, t)
            for kind, family in ((VariableKind.SLACK_UP, "SlackCapUp"), (VariableKind.SLACK_DOWN, "SlackCapDown")):
                container.add_constraint(
                    LinearConstraint(
                        constraint_name(family, component, t),
                        [(VarKey(kind, component, t), 1.0)],
                        Sense.LE,
                        0.0,
                        {cap: 1.0},
                    )
                )

    def add_objective(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        if not ctx.has_slacks:
            return
        penalty = SLACK_PENALTY * ctx.energy_scale
        component = self._slack_component(ctx)
        for t in ctx.steps:
            container.add_objective_term(VarKey(VariableKind.SLACK_UP, component, t), penalty)
            container.add_objective_term(VarKey(VariableKind.SLACK_DOWN, component, t), penalty)


class CopperPlate(_NetworkFormulation):
    """One system-wide balance equality per step, no line limits."""

    name = COPPER_PLATE
    balance_family = "CopperPlateBalance"

    def add_constraints(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        self._add_balance(container, ctx)
        self._add_slack_caps(container, ctx)


class PTDFDCPower(_NetworkFormulation):
    """System balance plus ``±Σ_b PTDF_{l,b}·netinj_b ≤ rating_l`` per line.

    Slacks sit at the slack bus, whose PTDF column is zero, so they never
    relieve a line limit.
    """

    name = PTDF_DC_POWER
    balance_family = "PTDFSystemBalance"

    def __init__(self, ptdf: PTDFMatrix | None = None):
        self.ptdf = ptdf

    def _slack_component(self, ctx: BuildContext) -> str:
        return self._slack_bus(ctx)

    def add_constraints(self, container: OptimizationContainer, ctx: BuildContext) -> None:
        if self.ptdf is None:
            self.ptdf = compute_ptdf(ctx.system)
        self._add_balance(container, ctx)
        self._add_slack_caps(container, ctx)
        for t in ctx.steps:
            expressions = [container.expression(balance_key(bus, t)) for bus in self.ptdf.buses]
            for i, line_name in enumerate(self.ptdf.lines):
                weights = self.ptdf.matrix[i]
                active = [j for j, w in enumerate(weights) if abs(w) > PTDF_TOLERANCE]
                flow = _merge([expressions[j] for j in active], [weights[j] for j in active])
                if not flow.terms:
                    logger.debug("Line '%s' carries no controllable flow at step %d", line_name, t)
                    continue
                rating = ctx.system.lines[line_name].rating
                container.add_constraint(_row(constraint_name("FlowLimitUp", line_name, t), flow, Sense.LE, rating))
                reverse = _merge([flow], [-1.0])
                container.add_constraint(
                    _row(constraint_name("FlowLimitDown", line_name, t), reverse, Sense.LE, rating)
                )

    def line_flows(self, container: OptimizationContainer, values: dict[VarKey, float], t: int) -> dict[str, float]:
        """Flows implied by a solution at step ``t``, per line."""
        injections = np.array(
            [evaluate_expression(container, container.expression(balance_key(bus, t)), values) for bus in self.ptdf.buses]
        )
        return dict(zip(self.ptdf.lines, self.ptdf.flows(injections).tolist()))


def evaluate_expression(
    container: OptimizationContainer, expr: Expression, values: dict[VarKey, float]
) -> float:
    total = expr.constant
    total += sum(coef * values.get(key, 0.0) for key, coef in expr.terms.items())
    total += sum(mult * container.parameter_value(key) for key, mult in expr.params.items())
    return float(total)


def make_network(template: ProblemTemplate, ptdf: PTDFMatrix | None = None) -> _NetworkFormulation:
    if template.network == COPPER_PLATE:
        return CopperPlate()
    if template.network == PTDF_DC_POWER:
        return PTDFDCPower(ptdf)
    raise BuildError(f"unknown network formulation '{template.network}'")


def build_network_copperplate(container: OptimizationContainer, sys: SystemModel, horizon: int) -> None:
    """Balance rows over the expressions already in ``container``."""
    ctx = BuildContext(sys, ProblemTemplate(), horizon, 1.0, InitialConditions())
    CopperPlate().add_constraints(container, ctx)


def build_network_ptdf(
    container: OptimizationContainer, sys: SystemModel, horizon: int, ptdf: PTDFMatrix | None = None
) -> None:
    ctx = BuildContext(sys, ProblemTemplate(network=PTDF_DC_POWER), horizon, 1.0, InitialConditions())
    PTDFDCPower(ptdf=ptdf).add_constraints(container, ctx)
