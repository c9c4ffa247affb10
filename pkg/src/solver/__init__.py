"""
Solver Module

Pluggable LP/MILP engines for optimization containers: the bundled tableau
simplex with branch and bound, and HiGHS through scipy.
"""

from src.solver.errors import SolverError
from src.solver.interface import (
    BundledSolver,
    HighsSolver,
    Solver,
    make_solver,
    relax_and_solve,
    solve_lp,
    solve_milp,
)
from src.solver.types import SolveResult, SolverOptions, SolveStats, SolveStatus

__all__ = [
    "BundledSolver",
    "HighsSolver",
    "SolveResult",
    "SolveStats",
    "SolveStatus",
    "Solver",
    "SolverError",
    "SolverOptions",
    "make_solver",
    "relax_and_solve",
    "solve_lp",
    "solve_milp",
]
