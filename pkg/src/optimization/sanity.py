"""Build-time checks for scaling problems and invalid values."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .container import OptimizationContainer

logger = logging.getLogger(__name__)

COEFFICIENT_RANGE = (1e-6, 1e6)


@dataclass(frozen=True)
class SanityFinding:
    check: str
    location: str
    value: float | None
    fatal: bool

    def __str__(self) -> str:
        severity = "fatal" if self.fatal else "warning"
        return f"[{severity}] {self.check}: {self.location} ({self.value})"


@dataclass
class SanityReport:
    findings: list[SanityFinding] = field(default_factory=list)

    @property
    def fatal(self) -> list[SanityFinding]:
        return [f for f in self.findings if f.fatal]

    @property
    def warnings(self) -> list[SanityFinding]:
        return [f for f in self.findings if not f.fatal]

    @property
    def is_clean(self) -> bool:
        return not self.findings

    def __len__(self) -> int:
        return len(self.findings)


def sanity_check(
    container: OptimizationContainer,
    coefficient_range: tuple[float, float] = COEFFICIENT_RANGE,
) -> SanityReport:
    """Inspect a built container.

    Reports constraint coefficients whose magnitude lies outside
    ``coefficient_range`` (warnings), NaN or infinite values in coefficients,
    right-hand sides, objective terms, parameters or bounds (fatal; infinite
    bounds are allowed), and rows without variables (fatal).
    """
    low, high = coefficient_range
    report = SanityReport()
    add = report.findings.append

    for con in container.constraints:
        if not con.coefficients:
            add(SanityFinding("empty constraint", con.name, None, True))
        for key, coef in con.coefficients:
            if not math.isfinite(coef):
                add(SanityFinding("nonfinite value", f"{con.name}[{key}]", coef, True))
            elif coef != 0.0 and not low <= abs(coef) <= high:
                add(SanityFinding("coefficient range", f"{con.name}[{key}]", coef, False))
        rhs = container.effective_rhs(con)
        if not math.isfinite(rhs):
            add(SanityFinding("nonfinite value", f"{con.name}.rhs", rhs, True))

    for key, coef in container.objective.terms.items():
        if not math.isfinite(coef):
            add(SanityFinding("nonfinite value", f"objective[{key}]", coef, True))
    if not math.isfinite(container.objective.constant):
        add(SanityFinding("nonfinite value", "objective.constant", container.objective.constant, True))
    for key, value in container.parameters.items():
        if not math.isfinite(value):
            add(SanityFinding("nonfinite value", f"parameter {key}", value, True))
    for var in container.variables:
        if math.isnan(var.lb) or math.isnan(var.ub):
            add(SanityFinding("nonfinite value", f"bounds of {var.key}", math.nan, True))

    for finding in report.warnings:
        logger.warning("Sanity check on '%s': %s", container.name, finding)
    return report
