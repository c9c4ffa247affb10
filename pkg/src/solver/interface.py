"""Solver contract and the engines behind it.

A ``Solver`` instance belongs to one model for the whole simulation. It reads
the container's standard form on every call, so parameter updates never
require a new instance, and it keeps the last integer incumbent per container
as the warm start of the next branch and bound.
"""

from __future__ import annotations

import logging
import time
from abc import ABC, abstractmethod

import numpy as np
import scipy.sparse as sp

from src.optimization.container import ObjectiveSense, OptimizationContainer, StandardForm

from .branch_and_bound import BranchAndBound, MILPOutcome
from .errors import SolverError
from .highs import highs_lp, highs_milp
from .simplex import LPOutcome, solve_lp_arrays
from .types import SolveResult, SolveStats, SolveStatus, SolverOptions

logger = logging.getLogger(__name__)


def _min_form(sf: StandardForm) -> tuple[np.ndarray, float]:
    sign = -1.0 if sf.sense is ObjectiveSense.MAX else 1.0
    return sign * sf.c, sign


def _lp_result(sf: StandardForm, outcome: LPOutcome, sign: float) -> SolveResult:
    stats = SolveStats(iterations=outcome.iterations)
    if outcome.status is not SolveStatus.OPTIMAL:
        return SolveResult(status=outcome.status, stats=stats)
    primal = dict(zip(sf.var_keys, outcome.x.tolist()))
    duals = None
    if outcome.duals is not None:
        duals = dict(zip(sf.row_names, (sign * outcome.duals).tolist()))
    reduced = None
    if outcome.reduced_costs is not None:
        reduced = dict(zip(sf.var_keys, (sign * outcome.reduced_costs).tolist()))
    dual_objective = None
    if outcome.dual_objective is not None:
        dual_objective = sign * outcome.dual_objective + sf.c0
    return SolveResult(
        status=SolveStatus.OPTIMAL,
        objective=sign * outcome.objective + sf.c0,
        primal=primal,
        duals=duals,
        reduced_costs=reduced,
        dual_objective=dual_objective,
        stats=stats,
    )


class Solver(ABC):
    """Engine-independent solve entry points for containers."""

    name = "abstract"

    def __init__(self, options: SolverOptions | None = None):
        self.options = options or SolverOptions()

    @abstractmethod
    def _lp(self, A, senses, b, lb, ub, c) -> LPOutcome: ...

    @abstractmethod
    def _milp(self, container, A, senses, b, lb, ub, c, integrality) -> MILPOutcome: ...

    def solve(self, container: OptimizationContainer) -> SolveResult:
        """Solve as MILP when the container has integral columns, else as LP."""
        if container.to_standard_form().integrality.any():
            return self.solve_milp(container)
        return self.solve_lp(container)

    def solve_lp(self, container: OptimizationContainer, relax: bool = False) -> SolveResult:
        """Solve a continuous container.

        Raises:
            SolverError: If the container has integral columns and ``relax``
                is False.
        """
        sf = container.to_standard_form()
        if sf.integrality.any() and not relax:
            raise SolverError(
                f"container '{container.name}' has integral variables; use solve_milp "
                "or pass relax=True"
            )
        started = time.perf_counter()
        c, sign = _min_form(sf)
        outcome = self._lp(sf.A, sf.senses, sf.b, sf.lb, sf.ub, c)
        result = _lp_result(sf, outcome, sign)
        result.stats.wall_time = time.perf_counter() - started
        return result

    def solve_milp(self, container: OptimizationContainer) -> SolveResult:
        sf = container.to_standard_form()
        started = time.perf_counter()
        c, sign = _min_form(sf)
        outcome = self._milp(
            container, sf.A, sf.senses, sf.b, sf.lb, sf.ub, c, sf.integrality
        )
        stats = SolveStats(
            iterations=outcome.iterations,
            nodes=outcome.nodes,
            wall_time=time.perf_counter() - started,
        )
        if outcome.status is not SolveStatus.OPTIMAL:
            return SolveResult(status=outcome.status, stats=stats)
        return SolveResult(
            status=SolveStatus.OPTIMAL,
            objective=sign * outcome.objective + sf.c0,
            primal=dict(zip(sf.var_keys, outcome.x.tolist())),
            stats=stats,
        )

    def relax_and_solve(self, container: OptimizationContainer) -> SolveResult:
        """LP relaxation with penalized violation columns on every row.

        Integrality is dropped and each row may be violated at a cost of
        ``options.relaxation_penalty`` per unit, so the result is always a
        usable point. The container itself is left untouched; the reported
        objective excludes the penalties and ``slack_usage`` lists the
        violated rows.

        Raises:
            SolverError: If even the penalized relaxation is unbounded.
        """
        sf = container.to_standard_form()
        started = time.perf_counter()
        c, sign = _min_form(sf)
        m, n = sf.A.shape
        # Violation columns: a x + u - v (sense) b with u, v >= 0.
        relax_up = np.flatnonzero(sf.senses != 1)
        relax_down = np.flatnonzero(sf.senses != -1)
        k_up, k_down = relax_up.size, relax_down.size
        columns = sp.hstack(
            [
                sf.A,
                sp.csr_matrix((np.ones(k_up), (relax_up, np.arange(k_up))), shape=(m, k_up)),
                sp.csr_matrix(
                    (-np.ones(k_down), (relax_down, np.arange(k_down))), shape=(m, k_down)
                ),
            ],
            format="csr",
        )
        penalty = np.full(k_up + k_down, self.options.relaxation_penalty)
        outcome = self._lp(
            columns,
            sf.senses,
            sf.b,
            np.concatenate([sf.lb, np.zeros(k_up + k_down)]),
            np.concatenate([sf.ub, np.full(k_up + k_down, np.inf)]),
            np.concatenate([c, penalty]),
        )
        stats = SolveStats(iterations=outcome.iterations, wall_time=time.perf_counter() - started)
        if outcome.status is SolveStatus.UNBOUNDED:
            raise SolverError(
                f"relaxation of '{container.name}' is unbounded even with penalized rows; "
                "check the input data"
            )
        if outcome.status is not SolveStatus.OPTIMAL:
            return SolveResult(status=outcome.status, stats=stats)
        x = outcome.x[:n]
        violation = np.zeros(m)
        violation[relax_up] += outcome.x[n : n + k_up]
        violation[relax_down] += outcome.x[n + k_up :]
        usage = {
            sf.row_names[i]: float(violation[i]) for i in np.flatnonzero(violation > 1e-9)
        }
        if usage:
            logger.warning(
                "Relaxed solve of '%s' violates %d rows (total %.6g)",
                container.name,
                len(usage),
                float(violation.sum()),
            )
        return SolveResult(
            status=SolveStatus.OPTIMAL,
            objective=float(sign * (c @ x)) + sf.c0,
            primal=dict(zip(sf.var_keys, x.tolist())),
            stats=stats,
            slack_usage=usage,
        )


class BundledSolver(Solver):
    """Tableau simplex for LPs, best-first branch and bound with diving for MILPs."""

    name = "bundled"

    def __init__(self, options: SolverOptions | None = None):
        super().__init__(options)
        self._incumbents: dict[int, tuple[int, np.ndarray]] = {}

    def _lp(self, A, senses, b, lb, ub, c) -> LPOutcome:
        return solve_lp_arrays(A, senses, b, lb, ub, c, self.options)

    def _milp(self, container, A, senses, b, lb, ub, c, integrality) -> MILPOutcome:
        key = id(container)
        warm = None
        previous = self._incumbents.get(key)
        if previous is not None and previous[0] == container.structure_version:
            warm = previous[1]
        outcome = BranchAndBound(A, senses, b, lb, ub, c, integrality, self.options, warm).solve()
        if outcome.status is SolveStatus.OPTIMAL:
            self._incumbents[key] = (
                container.structure_version,
                outcome.x[np.flatnonzero(integrality)].copy(),
            )
        return outcome


class HighsSolver(Solver):
    """HiGHS through scipy; same contract as the bundled engine."""

    name = "highs"

    def _lp(self, A, senses, b, lb, ub, c) -> LPOutcome:
        return highs_lp(A, senses, b, lb, ub, c, self.options)

    def _milp(self, container, A, senses, b, lb, ub, c, integrality) -> MILPOutcome:
        return highs_milp(A, senses, b, lb, ub, c, integrality, self.options)


ENGINES: dict[str, type[Solver]] = {"bundled": BundledSolver, "highs": HighsSolver}


def make_solver(options: SolverOptions | None = None) -> Solver:
    options = options or SolverOptions()
    try:
        return ENGINES[options.engine](options)
    except KeyError:
        raise SolverError(f"unknown solver engine '{options.engine}'") from None


def solve_lp(container: OptimizationContainer, options: SolverOptions | None = None) -> SolveResult:
    return make_solver(options).solve_lp(container)


def solve_milp(container: OptimizationContainer, options: SolverOptions | None = None) -> SolveResult:
    return make_solver(options).solve_milp(container)


def relax_and_solve(
    container: OptimizationContainer, options: SolverOptions | None = None
) -> SolveResult:
    return make_solver(options).relax_and_solve(container)
