"""Consistency checks run before any model is built or executed."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime

from src.formulations.builder import forecast_requirements
from src.system.system import SystemModel

from .errors import SequenceValidationError, TimingError
from .sequence import CHRONOLOGIES, SimulationSequence, TimedModel
from .timing import SimulationSpan, check_model_timing, divides, format_duration

logger = logging.getLogger(__name__)


@dataclass
class ValidationReport:
    """Outcome of ``validate_sequence``.

    Attributes:
        executions_per_step: Model name to executions per simulation step.
        findings: Violated rules; empty when the sequence is valid.
    """

    executions_per_step: dict[str, int] = field(default_factory=dict)
    findings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings


def issue_times(model: TimedModel, span: SimulationSpan) -> list[datetime]:
    count = (span.end - span.start) // model.interval
    return [span.start + j * model.interval for j in range(count)]


def _check_timing(seq: SimulationSequence, report: ValidationReport) -> None:
    for model in seq.models:
        try:
            check_model_timing(model.name, model.horizon_steps, model.resolution, model.interval)
        except TimingError as exc:
            report.findings.append(str(exc))
    for outer, inner in zip(seq.models, seq.models[1:]):
        if not divides(inner.interval, outer.interval):
            report.findings.append(
                f"interval {format_duration(inner.interval)} does not divide "
                f"{format_duration(outer.interval)} ('{inner.name}' inside '{outer.name}')"
            )
    if seq.emulator is not None:
        smallest = min(m.interval for m in seq.models)
        if not divides(seq.emulator.resolution, smallest):
            report.findings.append(
                f"emulator resolution {format_duration(seq.emulator.resolution)} does not divide "
                f"the smallest decision interval {format_duration(smallest)}"
            )


def _check_forecasts(seq: SimulationSequence, sys: SystemModel, span: SimulationSpan, report) -> None:
    registry = sys.time_series
    for model in seq.models:
        issues = issue_times(model, span)
        for _, component, label in forecast_requirements(model.template, sys):
            where = f"model '{model.name}', forecast '{component}/{label}'"
            if not registry.has_forecast(component, label):
                report.findings.append(f"{where}: missing forecast")
                continue
            forecast = registry.get_forecast(component, label)
            if forecast.resolution != model.resolution:
                report.findings.append(
                    f"{where}: forecast resolution {format_duration(forecast.resolution)} "
                    f"does not match model resolution {format_duration(model.resolution)}"
                )
            if forecast.horizon_steps < model.horizon_steps:
                report.findings.append(
                    f"{where}: forecast windows hold {forecast.horizon_steps} steps, "
                    f"model horizon needs {model.horizon_steps}"
                )
            missing = [t for t in issues if t not in forecast.windows]
            if missing:
                report.findings.append(
                    f"{where}: insufficient forecast coverage, no window issued at "
                    f"{missing[0].isoformat()} ({len(missing)} of {len(issues)} issue times missing)"
                )


def _check_realizations(seq: SimulationSequence, sys: SystemModel, span: SimulationSpan, report) -> None:
    emulator = seq.emulator
    if emulator is None:
        return
    registry = sys.time_series
    for _, component, label in forecast_requirements(emulator.template, sys):
        where = f"emulator '{emulator.name}', realization '{component}/{label}'"
        if not registry.has_realization(component, label):
            report.findings.append(f"{where}: missing realization")
            continue
        series = registry.get_realization_series(component, label)
        if not divides(series.resolution, emulator.resolution) or (span.start - series.start) % series.resolution:
            report.findings.append(
                f"{where}: realization grid {format_duration(series.resolution)} does not "
                f"align with emulator resolution {format_duration(emulator.resolution)}"
            )
        if not series.covers(span.start, span.end):
            report.findings.append(
                f"{where}: insufficient realization coverage for [{span.start.isoformat()}, {span.end.isoformat()})"
            )


def _check_feedforwards(seq: SimulationSequence, sys: SystemModel, report) -> None:
    names = seq.model_names
    for spec in seq.feedforwards:
        label = f"{spec.kind} feedforward {spec.source} -> {spec.target}"
        if spec.source not in names or spec.target not in names:
            report.findings.append(f"{label}: unknown model")
            continue
        if seq.emulator is not None and spec.source == seq.emulator.name:
            report.findings.append(f"{label}: the emulator cannot feed other models")
            continue
        if names.index(spec.source) >= names.index(spec.target):
            report.findings.append(f"{label}: source must execute before target")
        try:
            spec.resolve_components(sys)
        except ValueError as exc:
            report.findings.append(str(exc))


def validate_sequence(
    seq: SimulationSequence, sys: SystemModel, span: SimulationSpan
) -> ValidationReport:
    """Check timing consistency, data coverage and feedforward wiring.

    Raises:
        SequenceValidationError: Carrying every violated rule.
    """
    report = ValidationReport()
    if not seq.models:
        raise SequenceValidationError(["sequence has no decision models"])
    if seq.chronology not in CHRONOLOGIES:
        report.findings.append(f"unknown chronology '{seq.chronology}'")
    _check_timing(seq, report)
    if span.step_length != seq.outermost.interval:
        report.findings.append(
            f"simulation step {format_duration(span.step_length)} differs from the outermost "
            f"interval {format_duration(seq.outermost.interval)}"
        )
    if not report.findings:
        _check_forecasts(seq, sys, span, report)
        _check_realizations(seq, sys, span, report)
    _check_feedforwards(seq, sys, report)
    if report.findings:
        for finding in report.findings:
            logger.error("Sequence validation: %s", finding)
        raise SequenceValidationError(report.findings)

    for model in seq.models:
        report.executions_per_step[model.name] = seq.outermost.interval // model.interval
    if seq.emulator is not None:
        report.executions_per_step[seq.emulator.name] = seq.outermost.interval // seq.emulator.resolution
    logger.info("Sequence valid: %s executions per step", report.executions_per_step)
    return report

