"""
Optimization Module

Algebraic container for linear and mixed-integer models with updatable
parameters, plus serialization, LP export and build-time sanity checks.
"""

from src.optimization.container import (
    Expression,
    LinearConstraint,
    ObjectiveSense,
    OptimizationContainer,
    Sense,
    StandardForm,
    Variable,
)
from src.optimization.errors import ContainerError, ParameterError
from src.optimization.keys import (
    ExpressionKey,
    ParameterKind,
    ParamKey,
    VariableKind,
    VarKey,
    constraint_name,
)
from src.optimization.lp_format import write_lp
from src.optimization.sanity import SanityFinding, SanityReport, sanity_check
from src.optimization.serialization import (
    container_from_dict,
    container_to_dict,
    deserialize,
    serialize,
    structurally_equal,
)

__all__ = [
    "ContainerError",
    "Expression",
    "ExpressionKey",
    "LinearConstraint",
    "ObjectiveSense",
    "OptimizationContainer",
    "ParamKey",
    "ParameterError",
    "ParameterKind",
    "SanityFinding",
    "SanityReport",
    "Sense",
    "StandardForm",
    "VarKey",
    "Variable",
    "VariableKind",
    "constraint_name",
    "container_from_dict",
    "container_to_dict",
    "deserialize",
    "sanity_check",
    "serialize",
    "structurally_equal",
    "write_lp",
]
