"""CPLEX LP text export for cross-checking containers with external solvers."""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Union

from .container import ObjectiveSense, OptimizationContainer, Sense
from .keys import VarKey

_INVALID = re.compile(r"[^A-Za-z0-9_.]")
_SENSE_TEXT = {Sense.LE: "<=", Sense.EQ: "=", Sense.GE: ">="}


def lp_name(text: str) -> str:
    name = _INVALID.sub("_", text)
    return name if name[:1].isalpha() else f"x_{name}"


def _var_name(key: VarKey) -> str:
    return lp_name(f"{key.kind}_{key.component}_{key.t}")


def _linear(terms: list[tuple[str, float]]) -> str:
    parts = []
    for name, coef in terms:
        sign = "-" if coef < 0 else "+"
        parts.append(f"{sign} {abs(coef):.17g} {name}")
    text = " ".join(parts) if parts else "0"
    return text[2:] if text.startswith("+ ") else text


def _wrap(line: str, width: int = 250) -> list[str]:
    out, current = [], ""
    for token in line.split(" "):
        if current and len(current) + len(token) + 1 > width:
            out.append(current)
            current = " " + token
        else:
            current = f"{current} {token}" if current else token
    out.append(current)
    return out


def write_lp(container: OptimizationContainer, path: Union[str, Path]) -> Path:
    """Write ``container`` with current parameter values in CPLEX LP format."""
    sf = container.to_standard_form()
    names = [_var_name(k) for k in sf.var_keys]
    lines = [f"\\ Model {container.name}"]
    lines.append("Maximize" if sf.sense is ObjectiveSense.MAX else "Minimize")
    objective = [(names[j], sf.c[j]) for j in range(len(names)) if sf.c[j] != 0.0]
    obj_line = " obj: " + _linear(objective)
    if sf.c0:
        obj_line += f" {'-' if sf.c0 < 0 else '+'} {abs(sf.c0):.17g} constant_term"
    lines.extend(_wrap(obj_line))

    lines.append("Subject To")
    A = sf.A.tocsr()
    for i, constraint in enumerate(container.constraints):
        start, end = A.indptr[i], A.indptr[i + 1]
        terms = [(names[j], v) for j, v in zip(A.indices[start:end], A.data[start:end])]
        row = (
            f" {lp_name(constraint.name)}: {_linear(terms)} "
            f"{_SENSE_TEXT[constraint.sense]} {sf.b[i]:.17g}"
        )
        lines.extend(_wrap(row))

    lines.append("Bounds")
    if sf.c0:
        lines.append(" constant_term = 1")
    for name, lb, ub in zip(names, sf.lb, sf.ub):
        if math.isinf(lb) and math.isinf(ub):
            lines.append(f" {name} free")
        elif math.isinf(lb):
            lines.append(f" -inf <= {name} <= {ub:.17g}")
        elif math.isinf(ub):
            lines.append(f" {name} >= {lb:.17g}")
        else:
            lines.append(f" {lb:.17g} <= {name} <= {ub:.17g}")

    integral = [name for name, flag in zip(names, sf.integrality) if flag]
    if integral:
        lines.append("Generals")
        lines.extend(f" {name}" for name in integral)
    lines.append("End")

    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
