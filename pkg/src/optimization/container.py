"""Algebraic optimization container.

Holds variables with bounds and integrality flags, linear constraints whose
right-hand sides may be bound to named parameters, a linear objective with
parameter-scaled coefficients, and named linear expressions used while a
problem is being assembled. The container compiles to a sparse standard form
that is cached across parameter updates: updating a parameter only recomputes
the right-hand side and objective vectors.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .errors import ContainerError, ParameterError
from .keys import ExpressionKey, ParamKey, VarKey

logger = logging.getLogger(__name__)

INF = math.inf


class Sense(str, Enum):
    LE = "<="
    EQ = "=="
    GE = ">="


class ObjectiveSense(str, Enum):
    MIN = "min"
    MAX = "max"


@dataclass
class Variable:
    key: VarKey
    index: int
    lb: float
    ub: float
    integral: bool = False


@dataclass
class LinearConstraint:
    """One row ``Σ a_j x_j (sense) rhs + Σ m_k p_k``.

    Attributes:
        name: Unique row name, ``family::component::t`` by convention.
        coefficients: ``(VarKey, coefficient)`` pairs; a key may appear once.
        sense: Row sense.
        rhs: Constant part of the right-hand side.
        rhs_params: Parameters added to the right-hand side, each with its
            multiplier.
    """

    name: str
    coefficients: list[tuple[VarKey, float]]
    sense: Sense
    rhs: float = 0.0
    rhs_params: dict[ParamKey, float] = field(default_factory=dict)


@dataclass
class Objective:
    sense: ObjectiveSense = ObjectiveSense.MIN
    terms: dict[VarKey, float] = field(default_factory=lambda: defaultdict(float))
    constant: float = 0.0
    coefficient_params: dict[VarKey, dict[ParamKey, float]] = field(
        default_factory=lambda: defaultdict(dict)
    )
    constant_params: dict[ParamKey, float] = field(default_factory=dict)


@dataclass
class Expression:
    """Accumulated ``Σ a_j x_j + Σ m_k p_k + constant``."""

    terms: dict[VarKey, float] = field(default_factory=lambda: defaultdict(float))
    params: dict[ParamKey, float] = field(default_factory=lambda: defaultdict(float))
    constant: float = 0.0

    @property
    def is_empty(self) -> bool:
        return not self.terms and not self.params and self.constant == 0.0


@dataclass
class StandardForm:
    """Array view of a container: ``opt c·x + c0 s.t. A x (senses) b, lb ≤ x ≤ ub``.

    ``senses`` holds ``-1`` for ≥, ``0`` for = and ``1`` for ≤ rows.
    """

    c: np.ndarray
    c0: float
    A: sp.csr_matrix
    senses: np.ndarray
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    integrality: np.ndarray
    sense: ObjectiveSense
    var_keys: list[VarKey]
    row_names: list[str]

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape


_SENSE_CODES = {Sense.GE: -1, Sense.EQ: 0, Sense.LE: 1}


@dataclass
class _Structure:
    A: sp.csr_matrix
    senses: np.ndarray
    b0: np.ndarray
    P_rhs: sp.csr_matrix
    c_static: np.ndarray
    P_obj: sp.csr_matrix
    c0_static: float
    p_const: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    integrality: np.ndarray


class OptimizationContainer:
    """Variables, parameterized constraints and objective of one model.

    Args:
        name: Model name, stored in the metadata.
    """

    def __init__(self, name: str = ""):
        self.metadata: dict[str, str] = {"model": name}
        self._variables: dict[VarKey, Variable] = {}
        self._var_order: list[VarKey] = []
        self._constraints: list[LinearConstraint] = []
        self._row_index: dict[str, int] = {}
        self._param_index: dict[ParamKey, int] = {}
        self._param_keys: list[ParamKey] = []
        self._param_values: list[float] = []
        self._param_rows: dict[ParamKey, list[int]] = defaultdict(list)
        self.objective = Objective()
        self._expressions: dict[ExpressionKey, Expression] = {}
        self._structure: _Structure | None = None
        self.structure_version = 0
        self.sanity_report = None

    @property
    def name(self) -> str:
        return self.metadata.get("model", "")

    def _touch(self) -> None:
        self._structure = None
        self.structure_version += 1

    def stamp_build_time(self) -> None:
        self.metadata["built_at"] = datetime.now(timezone.utc).isoformat()

    # -------------
    # Variables
    # -------------

    def add_variable(
        self, key: VarKey, lb: float = 0.0, ub: float = INF, integral: bool = False
    ) -> int:
        """Register a variable and return its column index.

        Raises:
            ContainerError: On a duplicate key, NaN bounds or ``lb > ub``.
        """
        if key in self._variables:
            raise ContainerError(f"duplicate variable {key}")
        if math.isnan(lb) or math.isnan(ub):
            raise ContainerError(f"NaN bound on variable {key}")
        if lb > ub:
            raise ContainerError(f"inverted bounds on variable {key}: lb={lb} > ub={ub}")
        index = len(self._var_order)
        self._variables[key] = Variable(key, index, float(lb), float(ub), bool(integral))
        self._var_order.append(key)
        self._touch()
        return index

    def has_variable(self, key: VarKey) -> bool:
        return key in self._variables

    def variable(self, key: VarKey) -> Variable:
        try:
            return self._variables[key]
        except KeyError:
            raise ContainerError(f"unknown variable {key}") from None

    @property
    def variables(self) -> list[Variable]:
        return [self._variables[k] for k in self._var_order]

    def variables_of_kind(self, kind: str) -> list[Variable]:
        return [self._variables[k] for k in self._var_order if k.kind == kind]

    def set_variable_bounds(self, key: VarKey, lb: float, ub: float) -> None:
        if lb > ub:
            raise ContainerError(f"inverted bounds on variable {key}: lb={lb} > ub={ub}")
        var = self.variable(key)
        var.lb, var.ub = float(lb), float(ub)
        self._touch()

    @property
    def n_vars(self) -> int:
        return len(self._var_order)

    # -------------
    # Parameters
    # -------------

    def add_parameter(self, key: ParamKey, value: float = 0.0) -> None:
        """Register a parameter slot; re-adding an existing key is a no-op."""
        if key in self._param_index:
            return
        if not math.isfinite(value):
            raise ParameterError(f"non-finite value {value} for parameter {key}")
        self._param_index[key] = len(self._param_keys)
        self._param_keys.append(key)
        self._param_values.append(float(value))
        self._touch()

    def has_parameter(self, key: ParamKey) -> bool:
        return key in self._param_index

    def parameter_value(self, key: ParamKey) -> float:
        try:
            return self._param_values[self._param_index[key]]
        except KeyError:
            raise ParameterError(f"unknown parameter {key}") from None

    @property
    def parameters(self) -> dict[ParamKey, float]:
        return dict(zip(self._param_keys, self._param_values))

    def parameters_of_kind(self, kind: str) -> dict[ParamKey, float]:
        return {k: v for k, v in self.parameters.items() if k.kind == kind}

    def update_parameter(self, key: ParamKey, value: float) -> None:
        """Set a parameter value in place.

        Every right-hand side and objective slot bound to ``key`` follows the
        new value at the next ``to_standard_form``; no row or column changes.

        Raises:
            ParameterError: If the key is unknown or the value is not finite.
        """
        index = self._param_index.get(key)
        if index is None:
            raise ParameterError(f"unknown parameter {key}")
        if not math.isfinite(value):
            raise ParameterError(f"non-finite value {value} for parameter {key}")
        self._param_values[index] = float(value)

    def parameter_rows(self, key: ParamKey) -> list[str]:
        return [self._constraints[i].name for i in self._param_rows.get(key, [])]

    # -------------
    # Constraints
    # -------------

    def add_constraint(self, constraint: LinearConstraint) -> int:
        """Append a row and return its index.

        Raises:
            ContainerError: On an unknown or repeated variable, a non-finite
                coefficient, an unknown parameter or a duplicate row name.
        """
        if constraint.name in self._row_index:
            raise ContainerError(f"duplicate constraint name '{constraint.name}'")
        seen: set[VarKey] = set()
        for key, coef in constraint.coefficients:
            if key not in self._variables:
                raise ContainerError(
                    f"constraint '{constraint.name}' references unknown variable {key}"
                )
            if key in seen:
                raise ContainerError(
                    f"constraint '{constraint.name}' repeats variable {key}"
                )
            if not math.isfinite(coef):
                raise ContainerError(
                    f"non-finite coefficient {coef} for {key} in '{constraint.name}'"
                )
            seen.add(key)
        for key in constraint.rhs_params:
            if key not in self._param_index:
                raise ParameterError(
                    f"constraint '{constraint.name}' references unknown parameter {key}"
                )
        constraint.sense = Sense(constraint.sense)
        index = len(self._constraints)
        self._constraints.append(constraint)
        self._row_index[constraint.name] = index
        for key in constraint.rhs_params:
            self._param_rows[key].append(index)
        self._touch()
        return index

    def bind_parameter(self, row: str, key: ParamKey, multiplier: float) -> None:
        """Add ``multiplier·key`` to the right-hand side of an existing row.

        Raises:
            ParameterError: If ``key`` is unknown or already bound to ``row``.
        """
        constraint = self.constraint(row)
        if key not in self._param_index:
            raise ParameterError(f"constraint '{row}' references unknown parameter {key}")
        if key in constraint.rhs_params:
            raise ParameterError(f"parameter {key} is already bound to '{row}'")
        if not math.isfinite(multiplier):
            raise ContainerError(f"non-finite multiplier {multiplier} for {key} in '{row}'")
        constraint.rhs_params[key] = float(multiplier)
        self._param_rows[key].append(self._row_index[row])
        self._touch()

    def constraint(self, name: str) -> LinearConstraint:
        try:
            return self._constraints[self._row_index[name]]
        except KeyError:
            raise ContainerError(f"unknown constraint '{name}'") from None

    def has_constraint(self, name: str) -> bool:
        return name in self._row_index

    @property
    def constraints(self) -> list[LinearConstraint]:
        return list(self._constraints)

    def constraints_of_family(self, family: str) -> list[LinearConstraint]:
        prefix = f"{family}::"
        return [c for c in self._constraints if c.name.startswith(prefix)]

    @property
    def n_rows(self) -> int:
        return len(self._constraints)

    def effective_rhs(self, constraint: LinearConstraint) -> float:
        return constraint.rhs + sum(
            mult * self.parameter_value(key) for key, mult in constraint.rhs_params.items()
        )

    # -------------
    # Objective
    # -------------

    def set_objective_sense(self, sense: ObjectiveSense | str) -> None:
        self.objective.sense = ObjectiveSense(sense)
        self._touch()

    def add_objective_term(self, key: VarKey, coefficient: float) -> None:
        if key not in self._variables:
            raise ContainerError(f"objective references unknown variable {key}")
        if not math.isfinite(coefficient):
            raise ContainerError(f"non-finite objective coefficient for {key}")
        self.objective.terms[key] += coefficient
        self._touch()

    def add_objective_constant(self, value: float) -> None:
        self.objective.constant += value
        self._touch()

    def add_objective_parameter_term(
        self, key: VarKey, param: ParamKey, multiplier: float
    ) -> None:
        """Scale the objective coefficient of ``key`` by ``multiplier·param``."""
        if key not in self._variables:
            raise ContainerError(f"objective references unknown variable {key}")
        if param not in self._param_index:
            raise ParameterError(f"objective references unknown parameter {param}")
        slots = self.objective.coefficient_params[key]
        slots[param] = slots.get(param, 0.0) + multiplier
        self._touch()

    def add_objective_parameter_constant(self, param: ParamKey, multiplier: float) -> None:
        if param not in self._param_index:
            raise ParameterError(f"objective references unknown parameter {param}")
        slots = self.objective.constant_params
        slots[param] = slots.get(param, 0.0) + multiplier
        self._touch()

    # -------------
    # Expressions
    # -------------

    def _expression(self, key: ExpressionKey) -> Expression:
        if key not in self._expressions:
            self._expressions[key] = Expression()
        return self._expressions[key]

    def add_to_expression(self, key: ExpressionKey, var: VarKey, coefficient: float) -> None:
        if var not in self._variables:
            raise ContainerError(f"expression {key} references unknown variable {var}")
        self._expression(key).terms[var] += coefficient

    def add_parameter_to_expression(
        self, key: ExpressionKey, param: ParamKey, multiplier: float
    ) -> None:
        if param not in self._param_index:
            raise ParameterError(f"expression {key} references unknown parameter {param}")
        self._expression(key).params[param] += multiplier

    def add_constant_to_expression(self, key: ExpressionKey, value: float) -> None:
        self._expression(key).constant += value

    def expression(self, key: ExpressionKey) -> Expression:
        return self._expressions.get(key, Expression())

    def expressions_of_kind(self, kind: str) -> dict[ExpressionKey, Expression]:
        return {k: e for k, e in self._expressions.items() if k.kind == kind}

    # -------------
    # Standard form
    # -------------

    def _compile(self) -> _Structure:
        n, m, n_params = self.n_vars, self.n_rows, len(self._param_keys)
        rows, cols, data = [], [], []
        p_rows, p_cols, p_data = [], [], []
        b0 = np.zeros(m)
        senses = np.zeros(m, dtype=np.int8)
        for i, con in enumerate(self._constraints):
            for key, coef in con.coefficients:
                rows.append(i)
                cols.append(self._variables[key].index)
                data.append(coef)
            for key, mult in con.rhs_params.items():
                p_rows.append(i)
                p_cols.append(self._param_index[key])
                p_data.append(mult)
            b0[i] = con.rhs
            senses[i] = _SENSE_CODES[con.sense]
        A = sp.csr_matrix((data, (rows, cols)), shape=(m, n))
        A.eliminate_zeros()
        P_rhs = sp.csr_matrix((p_data, (p_rows, p_cols)), shape=(m, n_params))

        c_static = np.zeros(n)
        for key, coef in self.objective.terms.items():
            c_static[self._variables[key].index] += coef
        o_rows, o_cols, o_data = [], [], []
        for key, slots in self.objective.coefficient_params.items():
            for param, mult in slots.items():
                o_rows.append(self._variables[key].index)
                o_cols.append(self._param_index[param])
                o_data.append(mult)
        P_obj = sp.csr_matrix((o_data, (o_rows, o_cols)), shape=(n, n_params))
        p_const = np.zeros(n_params)
        for param, mult in self.objective.constant_params.items():
            p_const[self._param_index[param]] += mult

        variables = self.variables
        return _Structure(
            A=A,
            senses=senses,
            b0=b0,
            P_rhs=P_rhs,
            c_static=c_static,
            P_obj=P_obj,
            c0_static=self.objective.constant,
            p_const=p_const,
            lb=np.array([v.lb for v in variables], dtype=float),
            ub=np.array([v.ub for v in variables], dtype=float),
            integrality=np.array([v.integral for v in variables], dtype=bool),
        )

    def to_standard_form(self) -> StandardForm:
        """Return the array form with current parameter values applied."""
        if self._structure is None:
            self._structure = self._compile()
        s = self._structure
        values = np.asarray(self._param_values, dtype=float)
        b = s.b0 + (s.P_rhs @ values if values.size else 0.0)
        c = s.c_static + (s.P_obj @ values if values.size else 0.0)
        c0 = s.c0_static + (float(s.p_const @ values) if values.size else 0.0)
        return StandardForm(
            c=np.asarray(c, dtype=float),
            c0=c0,
            A=s.A,
            senses=s.senses,
            b=np.asarray(b, dtype=float),
            lb=s.lb,
            ub=s.ub,
            integrality=s.integrality,
            sense=self.objective.sense,
            var_keys=list(self._var_order),
            row_names=[c.name for c in self._constraints],
        )

    @property
    def fingerprint(self) -> tuple[int, int, int]:
        """Structural identity ``(n_vars, n_rows, nnz)``."""
        if self._structure is None:
            self._structure = self._compile()
        return self.n_vars, self.n_rows, int(self._structure.A.nnz)

    def evaluate_objective(self, values: dict[VarKey, float]) -> float:
        sf = self.to_standard_form()
        x = np.array([values.get(k, 0.0) for k in sf.var_keys])
        return float(sf.c @ x + sf.c0)

    def column_index(self, keys: Iterable[VarKey]) -> np.ndarray:
        return np.array([self._variables[k].index for k in keys], dtype=int)
