"""Bounded-variable simplex on a full tableau.

Every row ``i`` gets a slack column ``s_i`` so the system reads
``A x + s = b``; the slack bounds encode the row sense (``<=``: ``s >= 0``,
``>=``: ``s <= 0``, ``=``: ``s = 0``). The tableau stores ``B^-1 [A | I | R | b]``
where ``R`` holds the phase-one artificial columns; its last column is
``B^-1 b``. The original columns are kept sparse; refactorizations and the
final duals go through a sparse LU of the basis, and pivots only touch the
nonzero rows and columns of the pivot column and row.

Pricing is Dantzig with lowest-index tie breaking; after a run of degenerate
pivots the primal switches to Bland's rule until progress resumes. The dual
simplex re-optimizes after bound changes and is what branch and bound runs
at every node.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .types import SolveStatus, SolverOptions

logger = logging.getLogger(__name__)

BASIC = 0
AT_LOWER = 1
AT_UPPER = 2
AT_ZERO = 3

_DEGENERATE_RUN = 50
_DROP_TOL = 1e-13
# Above this share of touched entries a pivot updates the whole tableau.
_DENSE_PIVOT = 0.3


@dataclass
class LPOutcome:
    """Array-level LP result in minimization form."""

    status: SolveStatus
    x: np.ndarray | None = None
    objective: float = float("nan")
    duals: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None
    dual_objective: float | None = None
    iterations: int = 0


class IterationLimit(Exception):
    pass


class Tableau:
    """Simplex state for ``min c·x s.t. A x (senses) b, lb <= x <= ub``.

    Args:
        A: Constraint matrix ``(m, n)``, dense or scipy sparse.
        senses: Row senses, ``-1`` for ``>=``, ``0`` for ``=``, ``1`` for ``<=``.
        b: Right-hand side.
        lb: Lower variable bounds, ``-inf`` allowed.
        ub: Upper variable bounds, ``inf`` allowed.
        c: Costs of a minimization.
        options: Tolerances and limits.
    """

    def __init__(self, A, senses, b, lb, ub, c, options: SolverOptions):
        self.options = options
        self.m, self.n = A.shape
        m, n = self.m, self.n
        A = sp.csr_matrix(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        senses = np.asarray(senses)
        slack_lb = np.where(senses == -1, -np.inf, 0.0)
        slack_ub = np.where(senses == 1, np.inf, 0.0)
        self.lower = np.concatenate([np.asarray(lb, float), slack_lb])
        self.upper = np.concatenate([np.asarray(ub, float), slack_ub])
        self.cost = np.concatenate([np.asarray(c, float), np.zeros(m)])
        self.n_art = 0
        self.iterations = 0
        self.pivots_since_rebuild = 0
        self._iteration_cap = options.max_iterations
        self._feas_tol = options.feasibility_tol
        cmax = float(np.max(np.abs(c))) if n else 0.0
        self._opt_tol = options.optimality_tol * max(1.0, cmax)
        self._pivot_tol = 1e-9

        # Nonbasic structurals start at a finite bound, or at zero when free.
        x = np.zeros(n + m)
        status = np.full(n + m, AT_ZERO, dtype=np.int8)
        lo_finite = np.isfinite(self.lower[:n])
        up_finite = np.isfinite(self.upper[:n])
        x[:n] = np.where(lo_finite, self.lower[:n], np.where(up_finite, self.upper[:n], 0.0))
        status[:n] = np.where(lo_finite, AT_LOWER, np.where(up_finite, AT_UPPER, AT_ZERO))
        slack_values = self.b - A @ x[:n]

        low_violation = slack_values < slack_lb - self._feas_tol
        high_violation = slack_values > slack_ub + self._feas_tol
        needs_art = np.flatnonzero(low_violation | high_violation)
        bound = np.where(low_violation, slack_lb, slack_ub)
        residual = slack_values - bound
        sign = np.ones(m)
        sign[needs_art] = np.sign(residual[needs_art])

        k = needs_art.size
        self.n_art = k
        art = sp.csr_matrix((sign[needs_art], (needs_art, np.arange(k))), shape=(m, k))
        self.columns = sp.hstack([A, sp.identity(m, format="csr"), art], format="csc")
        total = n + m + k
        self.lower = np.concatenate([self.lower, np.zeros(k)])
        self.upper = np.concatenate([self.upper, np.full(k, np.inf)])
        self.cost = np.concatenate([self.cost, np.zeros(k)])
        self.x = np.concatenate([x, np.zeros(k)])
        self.status = np.concatenate([status, np.full(k, AT_LOWER, dtype=np.int8)])

        basis = np.arange(n, n + m)
        basis[needs_art] = n + m + np.arange(k)
        self.basis = basis
        slack_cols = n + needs_art
        self.x[slack_cols] = bound[needs_art]
        self.status[slack_cols] = np.where(
            low_violation[needs_art], AT_LOWER, AT_UPPER
        ).astype(np.int8)
        plain = np.setdiff1d(np.arange(m), needs_art)
        self.x[n + plain] = slack_values[plain]
        self.x[n + m + np.arange(k)] = np.abs(residual[needs_art])
        self.status[basis] = BASIC

        # B is diagonal with entries +-1, so B^-1 rows are the rows times sign.
        self.T = np.hstack([self.columns.toarray(), self.b[:, None]]) * sign[:, None]
        self.total = total
        self.r = np.zeros(total)

    # -------------
    # Shared pieces
    # -------------

    def _price(self, cost: np.ndarray) -> None:
        self.r = cost - cost[self.basis] @ self.T[:, :-1]

    def _pivot(self, p: int, q: int) -> None:
        T = self.T
        T[p, :] /= T[p, q]
        col = T[:, q].copy()
        col[p] = 0.0
        rows = np.flatnonzero(col)
        if rows.size:
            cols = np.flatnonzero(T[p, :])
            if rows.size * cols.size > _DENSE_PIVOT * T.size:
                T[rows, :] -= np.outer(col[rows], T[p, :])
            else:
                block = np.ix_(rows, cols)
                updated = T[block] - np.outer(col[rows], T[p, cols])
                updated[np.abs(updated) < _DROP_TOL] = 0.0
                T[block] = updated
        T[:, q] = 0.0
        T[p, q] = 1.0
        self.r -= self.r[q] * T[p, :-1]
        self.r[q] = 0.0
        self.basis[p] = q
        self.status[q] = BASIC
        self.iterations += 1
        self.pivots_since_rebuild += 1
        if self.iterations > self._iteration_cap:
            raise IterationLimit()

    def _movable(self):
        st = self.status
        span = self.upper > self.lower
        can_up = ((st == AT_LOWER) | (st == AT_ZERO)) & span
        can_down = ((st == AT_UPPER) | (st == AT_ZERO)) & span
        return can_up, can_down

    def _recompute_basics(self) -> None:
        nonbasic = self.status != BASIC
        x_n = np.where(nonbasic, self.x, 0.0)
        self.x[self.basis] = self.T[:, -1] - self.T[:, :-1] @ x_n

    # -------------
    # Primal simplex
    # -------------

    def _primal(self, cost: np.ndarray) -> SolveStatus:
        self._price(cost)
        degenerate = 0
        while True:
            can_up, can_down = self._movable()
            tol = self._opt_tol
            score = np.maximum(
                np.where(can_up & (self.r < -tol), -self.r, 0.0),
                np.where(can_down & (self.r > tol), self.r, 0.0),
            )
            if degenerate >= _DEGENERATE_RUN:
                candidates = np.flatnonzero(score > 0)
                if candidates.size == 0:
                    return SolveStatus.OPTIMAL
                q = int(candidates[0])
            else:
                q = int(np.argmax(score))
                if score[q] <= 0:
                    return SolveStatus.OPTIMAL
            direction = 1.0 if self.r[q] < 0 else -1.0
            alpha = direction * self.T[:, q]

            x_b = self.x[self.basis]
            lower_b = self.lower[self.basis]
            upper_b = self.upper[self.basis]
            ratios = np.full(self.m, np.inf)
            dec = alpha > self._pivot_tol
            inc = alpha < -self._pivot_tol
            ratios[dec] = (x_b[dec] - lower_b[dec]) / alpha[dec]
            ratios[inc] = (upper_b[inc] - x_b[inc]) / -alpha[inc]
            np.maximum(ratios, 0.0, out=ratios)
            flip = self.upper[q] - self.lower[q]
            best = float(ratios.min()) if self.m else np.inf
            theta = min(best, flip)
            if not np.isfinite(theta):
                return SolveStatus.UNBOUNDED

            degenerate = degenerate + 1 if theta <= self._feas_tol else 0
            self.x[self.basis] = x_b - theta * alpha
            self.x[q] += direction * theta
            if flip <= best:
                self.status[q] = AT_UPPER if direction > 0 else AT_LOWER
                self.x[q] = self.upper[q] if direction > 0 else self.lower[q]
                self.iterations += 1
                if self.iterations > self._iteration_cap:
                    raise IterationLimit()
                continue

            ties = np.flatnonzero(ratios <= best + 1e-12)
            p = int(ties[np.argmin(self.basis[ties])])
            leaving = self.basis[p]
            if alpha[p] > 0:
                self.x[leaving] = self.lower[leaving]
                self.status[leaving] = AT_LOWER
            else:
                self.x[leaving] = self.upper[leaving]
                self.status[leaving] = AT_UPPER
            self._pivot(p, q)

    def solve_primal(self) -> SolveStatus:
        """Two-phase primal simplex from the initial slack/artificial basis."""
        self._iteration_cap = self.iterations + self.options.max_iterations
        try:
            if self.n_art:
                phase_one = np.zeros(self.total)
                phase_one[self.n + self.m :] = 1.0
                self._primal(phase_one)
                infeasibility = float(self.x[self.n + self.m :].sum())
                if infeasibility > self._feas_tol * max(1.0, np.abs(self.b).max()):
                    return SolveStatus.INFEASIBLE
                self.upper[self.n + self.m :] = 0.0
            status = self._primal(self.cost)
        except IterationLimit:
            return SolveStatus.ITERATION_LIMIT
        if status is SolveStatus.OPTIMAL:
            return self._polish()
        return status

    # -------------
    # Dual simplex
    # -------------

    def set_bounds(self, lower: np.ndarray, upper: np.ndarray) -> bool:
        """Replace structural bounds and move nonbasic variables accordingly.

        Nonbasic variables sit at the bound their reduced cost prefers, which
        keeps the basis dual feasible. Returns False when that bound is
        infinite (the caller must then re-solve from scratch).
        """
        n = self.n
        self.lower[:n] = lower
        self.upper[:n] = upper
        nonbasic = np.flatnonzero(self.status[:n] != BASIC)
        tol = self._opt_tol
        for j in nonbasic:
            lo, hi, rj = self.lower[j], self.upper[j], self.r[j]
            if rj > tol or (abs(rj) <= tol and np.isfinite(lo)):
                if not np.isfinite(lo):
                    return False
                self.x[j], self.status[j] = lo, AT_LOWER
            elif rj < -tol or np.isfinite(hi):
                if not np.isfinite(hi):
                    return False
                self.x[j], self.status[j] = hi, AT_UPPER
            else:
                self.x[j], self.status[j] = 0.0, AT_ZERO
        self._recompute_basics()
        return True

    def solve_dual(self) -> SolveStatus:
        """Dual simplex from a dual feasible basis."""
        self._iteration_cap = self.iterations + self.options.max_iterations
        try:
            status = self._dual()
        except IterationLimit:
            return SolveStatus.ITERATION_LIMIT
        if status is SolveStatus.OPTIMAL:
            return self._polish()
        return status

    def _dual(self) -> SolveStatus:
        tol = self._feas_tol
        while True:
            x_b = self.x[self.basis]
            below = self.lower[self.basis] - x_b
            above = x_b - self.upper[self.basis]
            infeasibility = np.maximum(below, above)
            p = int(np.argmax(infeasibility)) if self.m else 0
            if not self.m or infeasibility[p] <= tol:
                return SolveStatus.OPTIMAL
            row = self.T[p, :-1]
            can_up, can_down = self._movable()
            can_up[self.basis] = False
            can_down[self.basis] = False
            pt = self._pivot_tol
            if below[p] > 0:
                target = self.lower[self.basis[p]]
                eligible = (can_up & (row < -pt)) | (can_down & (row > pt))
            else:
                target = self.upper[self.basis[p]]
                eligible = (can_up & (row > pt)) | (can_down & (row < -pt))
            candidates = np.flatnonzero(eligible)
            if candidates.size == 0:
                return SolveStatus.INFEASIBLE
            ratios = np.abs(self.r[candidates]) / np.abs(row[candidates])
            q = int(candidates[np.argmin(ratios)])

            step = (x_b[p] - target) / self.T[p, q]
            self.x[self.basis] = x_b - self.T[:, q] * step
            self.x[q] += step
            leaving = self.basis[p]
            self.x[leaving] = target
            self.status[leaving] = AT_LOWER if below[p] > 0 else AT_UPPER
            self._pivot(p, q)

    # -------------
    # Refactoring and solution extraction
    # -------------

    def _factor(self):
        """Sparse LU of the current basis matrix, or None when it is singular."""
        try:
            return splu(self.columns[:, self.basis].tocsc())
        except RuntimeError:
            return None

    def rebuild(self) -> bool:
        """Recompute the whole tableau from the original columns and basis.

        Returns False, leaving the tableau as it was, when the basis is singular.
        """
        lu = self._factor()
        if lu is None:
            return False
        T = lu.solve(np.hstack([self.columns.toarray(), self.b[:, None]]))
        self.T = np.ascontiguousarray(T)
        self.T[:, self.basis] = np.eye(self.m)
        self._recompute_basics()
        self._price(self.cost)
        self.pivots_since_rebuild = 0
        return True

    def _polish(self) -> SolveStatus:
        """Recompute basic values exactly; fall back to a rebuild on drift."""
        if not self.m:
            return SolveStatus.OPTIMAL
        lu = self._factor()
        if lu is None:
            return SolveStatus.ITERATION_LIMIT
        nonbasic = self.status != BASIC
        x_n = np.where(nonbasic, self.x, 0.0)
        x_b = lu.solve(self.b - self.columns @ x_n)
        drift = float(np.max(np.abs(x_b - self.x[self.basis])))
        self.x[self.basis] = x_b
        lower_b = self.lower[self.basis]
        upper_b = self.upper[self.basis]
        scale = max(1.0, float(np.max(np.abs(x_b))))
        infeasible = np.any(x_b < lower_b - 1e-7 * scale) or np.any(
            x_b > upper_b + 1e-7 * scale
        )
        if drift > 1e-7 * scale or infeasible:
            logger.debug("Tableau drift %.3g, rebuilding and re-optimizing", drift)
            if not self.rebuild():
                return SolveStatus.ITERATION_LIMIT
            try:
                status = self._dual() if self._dual_feasible() else self._primal(self.cost)
            except IterationLimit:
                return SolveStatus.ITERATION_LIMIT
            if status is not SolveStatus.OPTIMAL:
                return status
        return SolveStatus.OPTIMAL

    def _dual_feasible(self) -> bool:
        can_up, can_down = self._movable()
        tol = self._opt_tol
        return not np.any(can_up & (self.r < -tol)) and not np.any(can_down & (self.r > tol))

    def outcome(self, status: SolveStatus) -> LPOutcome:
        if status is not SolveStatus.OPTIMAL:
            return LPOutcome(status=status, iterations=self.iterations)
        x = self.x[: self.n].copy()
        objective = float(self.cost[: self.n] @ x)
        if self.m:
            lu = self._factor()
            if lu is None:
                return LPOutcome(status=SolveStatus.ITERATION_LIMIT, iterations=self.iterations)
            y = lu.solve(self.cost[self.basis], trans="T")
            d = self.cost - self.columns.T @ y
        else:
            y = np.zeros(0)
            d = self.cost.copy()
        # Dual bound: b·y plus each nonzero reduced cost at the bound it prices.
        dual_objective = float(self.b @ y)
        for j in np.flatnonzero(np.abs(d[: self.n + self.m]) > 0):
            bound = self.lower[j] if d[j] > 0 else self.upper[j]
            dual_objective += d[j] * (bound if np.isfinite(bound) else self.x[j])
        return LPOutcome(
            status=status,
            x=x,
            objective=objective,
            duals=y,
            reduced_costs=d[: self.n].copy(),
            dual_objective=dual_objective,
            iterations=self.iterations,
        )


def solve_lp_arrays(A, senses, b, lb, ub, c, options: SolverOptions) -> LPOutcome:
    """Solve ``min c·x`` over the given rows and bounds with the bundled simplex."""
    lb = np.asarray(lb, float)
    ub = np.asarray(ub, float)
    if np.any(lb > ub):
        return LPOutcome(status=SolveStatus.INFEASIBLE)
    tableau = Tableau(A, senses, b, lb, ub, c, options)
    status = tableau.solve_primal()
    return tableau.outcome(status)
