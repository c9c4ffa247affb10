"""Best-first branch and bound over the bundled simplex.

All nodes share one tableau: a node applies its integer bounds to the current
basis and re-optimizes with the dual simplex. Branching picks the most
fractional integer variable (lowest index on ties); open nodes are ordered by
their parent's LP bound, then by creation order.

Incumbents come from the previous execution's pattern, two roundings of the
root and fractional diving: round the least fractional integer, re-solve, and
repeat until the relaxation is integral or every rounding fails. The dive runs
at the root and again every few dozen nodes.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .simplex import Tableau
from .types import SolveStatus, SolverOptions

logger = logging.getLogger(__name__)

_DIVE_INTERVAL = 50


@dataclass(order=True)
class _Node:
    bound: float
    node_id: int
    lower: np.ndarray = field(compare=False)
    upper: np.ndarray = field(compare=False)


@dataclass
class MILPOutcome:
    status: SolveStatus
    x: np.ndarray | None = None
    objective: float = float("nan")
    best_bound: float = float("nan")
    nodes: int = 0
    iterations: int = 0


class BranchAndBound:
    """Mixed-integer minimization ``min c·x`` with ``x_j`` integral where flagged.

    Args:
        A, senses, b, lb, ub, c: Problem arrays as for ``Tableau``.
        integrality: Boolean mask of integer columns.
        options: Limits, gap and tolerances.
        warm_start: Integer values of a previous incumbent; used as the first
            incumbent when still feasible.
    """

    def __init__(
        self,
        A,
        senses,
        b,
        lb,
        ub,
        c,
        integrality,
        options: SolverOptions,
        warm_start: np.ndarray | None = None,
    ):
        self.options = options
        self.A, self.senses, self.b, self.c = A, senses, b, np.asarray(c, float)
        self.int_idx = np.flatnonzero(integrality)
        self.lb = np.asarray(lb, float).copy()
        self.ub = np.asarray(ub, float).copy()
        self.lb[self.int_idx] = np.ceil(self.lb[self.int_idx] - options.integrality_tol)
        self.ub[self.int_idx] = np.floor(self.ub[self.int_idx] + options.integrality_tol)
        self.warm_start = warm_start
        self.tableau: Tableau | None = None
        self._retired_iterations = 0
        self.incumbent: np.ndarray | None = None
        self.incumbent_obj = math.inf

    @property
    def iterations(self) -> int:
        current = self.tableau.iterations if self.tableau is not None else 0
        return self._retired_iterations + current

    def _gap_tolerance(self) -> float:
        if self.incumbent is None:
            return 0.0
        scale = max(1.0, abs(self.incumbent_obj))
        return max(self.options.mip_gap * abs(self.incumbent_obj), 1e-9 * scale)

    def _fresh_tableau(self, lower, upper) -> SolveStatus:
        if self.tableau is not None:
            self._retired_iterations += self.tableau.iterations
        self.tableau = Tableau(self.A, self.senses, self.b, lower, upper, self.c, self.options)
        return self.tableau.solve_primal()

    def _solve_node(self, lower_int: np.ndarray, upper_int: np.ndarray):
        lower = self.lb.copy()
        upper = self.ub.copy()
        lower[self.int_idx] = lower_int
        upper[self.int_idx] = upper_int
        if np.any(lower > upper):
            return SolveStatus.INFEASIBLE, None, math.inf
        tableau = self.tableau
        stale = tableau.pivots_since_rebuild > self.options.refactor_interval
        if stale and not tableau.rebuild():
            status = self._fresh_tableau(lower, upper)
        elif tableau.set_bounds(lower, upper):
            status = tableau.solve_dual()
        else:
            status = self._fresh_tableau(lower, upper)
        if status is not SolveStatus.OPTIMAL:
            return status, None, math.inf
        x = self.tableau.x[: len(self.c)].copy()
        return status, x, float(self.c @ x)

    def _is_integral(self, x: np.ndarray) -> bool:
        values = x[self.int_idx]
        return bool(np.all(np.abs(values - np.round(values)) <= self.options.integrality_tol))

    def _accept(self, x: np.ndarray, objective: float, source: str) -> None:
        if objective < self.incumbent_obj:
            self.incumbent, self.incumbent_obj = x, objective
            logger.debug("New incumbent %.6f from %s", objective, source)

    def _try_pattern(self, values: np.ndarray, source: str) -> None:
        fixed = np.clip(np.round(values), self.lb[self.int_idx], self.ub[self.int_idx])
        status, x, objective = self._solve_node(fixed, fixed)
        if status is SolveStatus.OPTIMAL:
            self._accept(x, objective, source)

    def _dive(self, x: np.ndarray, lower_int: np.ndarray, upper_int: np.ndarray) -> None:
        lower, upper = lower_int.copy(), upper_int.copy()
        objective = float(self.c @ x)
        tol = self.options.integrality_tol
        for _ in range(len(self.int_idx)):
            values = x[self.int_idx]
            frac = np.abs(values - np.round(values))
            if np.all(frac <= tol):
                self._accept(x, objective, "diving")
                return
            candidates = np.flatnonzero((frac > tol) & (lower < upper))
            if candidates.size == 0:
                return
            j = int(candidates[np.argmin(frac[candidates])])
            nearest = float(np.round(values[j]))
            other = math.floor(values[j]) if nearest > values[j] else math.ceil(values[j])
            for target in (nearest, float(other)):
                trial_lower, trial_upper = lower.copy(), upper.copy()
                trial_lower[j] = trial_upper[j] = target
                status, trial_x, trial_obj = self._solve_node(trial_lower, trial_upper)
                if status is SolveStatus.OPTIMAL:
                    break
            else:
                return
            if trial_obj >= self.incumbent_obj - self._gap_tolerance():
                return
            lower, upper, x, objective = trial_lower, trial_upper, trial_x, trial_obj

    def solve(self) -> MILPOutcome:
        status = self._fresh_tableau(self.lb, self.ub)
        if status is not SolveStatus.OPTIMAL:
            return MILPOutcome(status=status, iterations=self.iterations)
        root = self.tableau.x[: len(self.c)].copy()
        root_obj = float(self.c @ root)
        root_lower = self.lb[self.int_idx].copy()
        root_upper = self.ub[self.int_idx].copy()

        if self._is_integral(root):
            self._accept(root, root_obj, "root")
        else:
            if self.warm_start is not None and len(self.warm_start) == len(self.int_idx):
                self._try_pattern(self.warm_start, "previous incumbent")
            self._try_pattern(np.ceil(root[self.int_idx] - self.options.integrality_tol), "ceil rounding")
            self._try_pattern(root[self.int_idx], "nearest rounding")
            self._dive(root, root_lower, root_upper)

        heap = [_Node(root_obj, 0, root_lower, root_upper)]
        next_id = 1
        nodes = 0
        limited = False
        while heap:
            node = heapq.heappop(heap)
            if node.bound >= self.incumbent_obj - self._gap_tolerance():
                heap.clear()
                break
            if nodes >= self.options.node_limit:
                limited = True
                heapq.heappush(heap, node)
                break
            nodes += 1
            status, x, objective = self._solve_node(node.lower, node.upper)
            if status is SolveStatus.ITERATION_LIMIT:
                return MILPOutcome(status=status, nodes=nodes, iterations=self.iterations)
            if status is not SolveStatus.OPTIMAL:
                continue
            if objective >= self.incumbent_obj - self._gap_tolerance():
                continue
            values = x[self.int_idx]
            frac = np.abs(values - np.round(values))
            if np.all(frac <= self.options.integrality_tol):
                self._accept(x, objective, f"node {node.node_id}")
                continue
            if nodes % _DIVE_INTERVAL == 0:
                self._dive(x, node.lower, node.upper)
            j = int(np.argmax(frac))
            value = values[j]
            down_upper = node.upper.copy()
            down_upper[j] = math.floor(value)
            up_lower = node.lower.copy()
            up_lower[j] = math.ceil(value)
            heapq.heappush(heap, _Node(objective, next_id, node.lower, down_upper))
            heapq.heappush(heap, _Node(objective, next_id + 1, up_lower, node.upper))
            next_id += 2

        best_bound = min([n.bound for n in heap], default=self.incumbent_obj)
        if self.incumbent is None:
            status = SolveStatus.NODE_LIMIT if limited else SolveStatus.INFEASIBLE
            return MILPOutcome(status=status, nodes=nodes, iterations=self.iterations)
        if limited:
            logger.warning(
                "Node limit %d reached with incumbent %.6f (bound %.6f)",
                self.options.node_limit,
                self.incumbent_obj,
                best_bound,
            )
            return MILPOutcome(
                status=SolveStatus.NODE_LIMIT,
                objective=self.incumbent_obj,
                best_bound=best_bound,
                nodes=nodes,
                iterations=self.iterations,
            )

        # Final solve with the integers fixed exactly.
        pattern = np.round(self.incumbent[self.int_idx])
        status, x, objective = self._solve_node(pattern, pattern)
        if status is not SolveStatus.OPTIMAL:
            x, objective = self.incumbent, self.incumbent_obj
        x = x.copy()
        x[self.int_idx] = pattern
        return MILPOutcome(
            status=SolveStatus.OPTIMAL,
            x=x,
            objective=objective,
            best_bound=min(best_bound, objective),
            nodes=nodes,
            iterations=self.iterations,
        )
