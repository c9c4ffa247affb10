"""JSON dump and reload of optimization containers.

The document is self-describing: variables with bounds and integrality,
parameters with their current values, rows with their parameter slots, and the
objective. Infinite bounds are written as ``null``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Union

from .container import LinearConstraint, ObjectiveSense, OptimizationContainer, Sense
from .keys import ParamKey, VarKey

FORMAT = "opsim-container"
VERSION = 1


def _key(key: VarKey | ParamKey) -> list:
    return [key.kind, key.component, key.t]


def _bound(value: float) -> float | None:
    return None if math.isinf(value) else value


def container_to_dict(container: OptimizationContainer) -> dict[str, Any]:
    """Logical content of a container as plain JSON-compatible data."""
    objective = container.objective
    return {
        "format": FORMAT,
        "version": VERSION,
        "metadata": dict(sorted(container.metadata.items())),
        "variables": [
            {
                "key": _key(v.key),
                "lb": _bound(v.lb),
                "ub": _bound(v.ub),
                "integral": v.integral,
            }
            for v in container.variables
        ],
        "parameters": [
            {"key": _key(k), "value": value} for k, value in container.parameters.items()
        ],
        "constraints": [
            {
                "name": c.name,
                "sense": c.sense.value,
                "rhs": c.rhs,
                "terms": [[*_key(k), coef] for k, coef in c.coefficients],
                "rhs_params": [[*_key(k), mult] for k, mult in c.rhs_params.items()],
            }
            for c in container.constraints
        ],
        "objective": {
            "sense": objective.sense.value,
            "constant": objective.constant,
            "terms": [[*_key(k), coef] for k, coef in objective.terms.items()],
            "coefficient_params": [
                [*_key(var), *_key(param), mult]
                for var, slots in objective.coefficient_params.items()
                for param, mult in slots.items()
            ],
            "constant_params": [
                [*_key(k), mult] for k, mult in objective.constant_params.items()
            ],
        },
    }


def container_from_dict(data: dict[str, Any]) -> OptimizationContainer:
    if data.get("format") != FORMAT:
        raise ValueError(f"not an {FORMAT} document")
    container = OptimizationContainer(data["metadata"].get("model", ""))
    container.metadata.update(data["metadata"])
    for v in data["variables"]:
        lb = -math.inf if v["lb"] is None else v["lb"]
        ub = math.inf if v["ub"] is None else v["ub"]
        container.add_variable(VarKey(*v["key"]), lb, ub, v["integral"])
    for p in data["parameters"]:
        container.add_parameter(ParamKey(*p["key"]), p["value"])
    for c in data["constraints"]:
        container.add_constraint(
            LinearConstraint(
                name=c["name"],
                coefficients=[(VarKey(*t[:3]), t[3]) for t in c["terms"]],
                sense=Sense(c["sense"]),
                rhs=c["rhs"],
                rhs_params={ParamKey(*t[:3]): t[3] for t in c["rhs_params"]},
            )
        )
    objective = data["objective"]
    container.set_objective_sense(ObjectiveSense(objective["sense"]))
    container.add_objective_constant(objective["constant"])
    for t in objective["terms"]:
        container.add_objective_term(VarKey(*t[:3]), t[3])
    for t in objective["coefficient_params"]:
        container.add_objective_parameter_term(VarKey(*t[:3]), ParamKey(*t[3:6]), t[6])
    for t in objective["constant_params"]:
        container.add_objective_parameter_constant(ParamKey(*t[:3]), t[3])
    return container


def serialize(container: OptimizationContainer, path: Union[str, Path]) -> Path:
    """Write the container as one JSON document.

    Raises:
        OSError: If the path cannot be written.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(container_to_dict(container), f, indent=1)
    return path


def deserialize(path: Union[str, Path]) -> OptimizationContainer:
    with open(path, "r", encoding="utf-8") as f:
        return container_from_dict(json.load(f))


def structurally_equal(a: OptimizationContainer, b: OptimizationContainer) -> bool:
    return container_to_dict(a) == container_to_dict(b)
