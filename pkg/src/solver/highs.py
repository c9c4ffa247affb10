"""HiGHS engine through ``scipy.optimize`` (``linprog`` for LPs, ``milp`` for MILPs)."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from .branch_and_bound import MILPOutcome
from .simplex import LPOutcome
from .types import SolveStatus, SolverOptions

_LINPROG_STATUS = {
    0: SolveStatus.OPTIMAL,
    1: SolveStatus.ITERATION_LIMIT,
    2: SolveStatus.INFEASIBLE,
    3: SolveStatus.UNBOUNDED,
    4: SolveStatus.ITERATION_LIMIT,
}


def highs_lp(A, senses, b, lb, ub, c, options: SolverOptions) -> LPOutcome:
    A = sp.csr_matrix(A)
    senses = np.asarray(senses)
    le, ge, eq = senses == 1, senses == -1, senses == 0
    A_ub = sp.vstack([A[le], -A[ge]]) if (le.any() or ge.any()) else None
    b_ub = np.concatenate([b[le], -b[ge]]) if A_ub is not None else None
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A[eq] if eq.any() else None,
        b_eq=b[eq] if eq.any() else None,
        bounds=np.column_stack([lb, ub]),
        method="highs",
        options={"maxiter": options.max_iterations},
    )
    status = _LINPROG_STATUS.get(res.status, SolveStatus.ITERATION_LIMIT)
    iterations = int(getattr(res, "nit", 0) or 0)
    if status is not SolveStatus.OPTIMAL:
        return LPOutcome(status=status, iterations=iterations)
    duals = np.zeros(len(b))
    if A_ub is not None:
        marginals = res.ineqlin.marginals
        n_le = int(le.sum())
        duals[le] = marginals[:n_le]
        duals[ge] = -marginals[n_le:]
    if eq.any():
        duals[eq] = res.eqlin.marginals
    reduced = res.lower.marginals + res.upper.marginals
    return LPOutcome(
        status=status,
        x=np.asarray(res.x),
        objective=float(res.fun),
        duals=duals,
        reduced_costs=np.asarray(reduced),
        dual_objective=float(res.fun),
        iterations=iterations,
    )


def highs_milp(A, senses, b, lb, ub, c, integrality, options: SolverOptions) -> MILPOutcome:
    senses = np.asarray(senses)
    row_lb = np.where(senses == 1, -np.inf, b)
    row_ub = np.where(senses == -1, np.inf, b)
    res = milp(
        c,
        constraints=[LinearConstraint(sp.csr_matrix(A), row_lb, row_ub)] if len(b) else None,
        integrality=np.asarray(integrality, dtype=int),
        bounds=Bounds(lb, ub),
        options={"node_limit": options.node_limit, "mip_rel_gap": options.mip_gap},
    )
    if res.status == 0:
        return MILPOutcome(
            status=SolveStatus.OPTIMAL,
            x=np.asarray(res.x),
            objective=float(res.fun),
            best_bound=float(getattr(res, "mip_dual_bound", res.fun)),
            nodes=int(getattr(res, "mip_node_count", 0) or 0),
        )
    status = {
        1: SolveStatus.NODE_LIMIT,
        2: SolveStatus.INFEASIBLE,
        3: SolveStatus.UNBOUNDED,
    }.get(res.status, SolveStatus.ITERATION_LIMIT)
    return MILPOutcome(status=status)
