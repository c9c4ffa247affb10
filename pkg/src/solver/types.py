"""Solver options, statuses and results."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from src.optimization.keys import VarKey


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NODE_LIMIT = "node_limit"


@dataclass(frozen=True)
class SolverOptions:
    """Tuning knobs shared by every engine.

    Attributes:
        engine: ``"bundled"`` (tableau simplex + branch and bound) or ``"highs"``.
        max_iterations: Simplex pivot limit per solve.
        node_limit: Branch-and-bound node limit.
        mip_gap: Relative optimality gap at which branch and bound stops.
        feasibility_tol: Primal feasibility tolerance.
        optimality_tol: Reduced-cost tolerance, relative to the largest cost.
        integrality_tol: Distance from an integer still counted as integral.
        refactor_interval: Pivots between full tableau rebuilds in branch and
            bound.
        relaxation_penalty: Cost per unit of row violation in
            ``relax_and_solve``.
    """

    engine: str = "bundled"
    max_iterations: int = 50_000
    node_limit: int = 100_000
    mip_gap: float = 1e-6
    feasibility_tol: float = 1e-9
    optimality_tol: float = 1e-9
    integrality_tol: float = 1e-6
    refactor_interval: int = 2_000
    relaxation_penalty: float = 1e6

    @classmethod
    def from_mapping(cls, data: dict | None) -> "SolverOptions":
        data = dict(data or {})
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        return cls(**known)


@dataclass
class SolveStats:
    iterations: int = 0
    nodes: int = 0
    wall_time: float = 0.0


@dataclass
class SolveResult:
    """Outcome of one solve.

    ``primal`` is set iff ``status`` is optimal; ``duals``, ``reduced_costs``
    and ``dual_objective`` only for continuous problems. Dual values are
    sensitivities of the reported objective to the row right-hand sides.
    ``slack_usage`` lists the row violations chosen by ``relax_and_solve``.
    """

    status: SolveStatus
    objective: float = float("nan")
    primal: dict[VarKey, float] | None = None
    duals: dict[str, float] | None = None
    reduced_costs: dict[VarKey, float] | None = None
    dual_objective: float | None = None
    stats: SolveStats = field(default_factory=SolveStats)
    slack_usage: dict[str, float] = field(default_factory=dict)
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL
