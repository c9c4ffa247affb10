"""Feedforward rows, parameter refresh from the state and spec parsing."""

import math
from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest
from conftest import HOUR, START

from src.feedforwards import (
    FeedforwardError,
    FeedforwardGapError,
    FeedforwardSpec,
    attach_bound,
    attach_feedforward,
    refresh_transition_allowances,
    update_feedforward_params,
)
from src.formulations import ProblemTemplate, build_problem, descriptor_initial_conditions
from src.optimization import OptimizationContainer, ParameterKind, ParamKey, Sense, VariableKind, VarKey
from src.sequence import SimulationState
from src.solver import BundledSolver, SolveStatus
from src.system.loader import load_system

ED_DEVICES = {"ThermalGen": "ThermalBasicDispatch", "Load": "StaticPowerLoad"}


def dispatch(system, horizon=2, load=0.9):
    container = build_problem(
        ProblemTemplate(devices=dict(ED_DEVICES)), system, horizon, 1.0, descriptor_initial_conditions(system), name="ED"
    )
    for t in range(1, horizon + 1):
        container.update_parameter(ParamKey(ParameterKind.FORECAST_BOUND, "load", t), load)
    return container


def semicontinuous(components="ThermalGen"):
    return FeedforwardSpec.from_mapping({"kind": "SemiContinuous", "source": "UC", "target": "ED", "components": components})


def power(result, unit, t=1):
    return result.primal[VarKey(VariableKind.ACTIVE_POWER, unit, t)]


class TestSemiContinuous:
    def test_rows_replace_static_bounds(self, small_system):
        container = dispatch(small_system)
        attach_feedforward(container, semicontinuous(), small_system)
        status = ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, "peaker", 2)
        assert container.parameter_value(status) == 1.0
        upper = container.constraint("FeedforwardSemiContinuousUB::peaker::2")
        lower = container.constraint("FeedforwardSemiContinuousLB::peaker::2")
        assert upper.rhs_params == {status: 1.0}
        assert lower.rhs_params == {status: pytest.approx(-0.1)}
        assert container.variable(VarKey(VariableKind.ACTIVE_POWER, "peaker", 2)).lb == 0.0

    def test_status_switches_unit(self, small_system):
        container = dispatch(small_system)
        attach_feedforward(container, semicontinuous(), small_system)
        solver = BundledSolver()
        committed = solver.solve_lp(container)
        assert power(committed, "peaker") == pytest.approx(0.1)
        assert power(committed, "cheap") == pytest.approx(0.8)
        for t in (1, 2):
            container.update_parameter(ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, "peaker", t), 0.0)
        decommitted = solver.solve_lp(container)
        assert power(decommitted, "peaker") == pytest.approx(0.0, abs=1e-9)
        assert power(decommitted, "cheap") == pytest.approx(0.9)


def slow_peaker(system, **changes):
    """Peaker whose minimum output exceeds one hour of ramping."""
    system.thermal_gens["peaker"] = replace(
        system.thermal_gens["peaker"], p_min=0.3, ramp_up=0.1, ramp_down=0.1, **changes
    )
    return system


def allowance(container, kind, t, unit="peaker"):
    return container.parameter_value(ParamKey(kind, unit, t))


class TestTransitionAllowances:
    def test_rows_carry_allowances(self, small_system):
        container = dispatch(slow_peaker(small_system))
        attach_feedforward(container, semicontinuous(), small_system)
        start = ParamKey(ParameterKind.FEEDFORWARD_START_ALLOWANCE, "peaker", 1)
        stop = ParamKey(ParameterKind.FEEDFORWARD_STOP_ALLOWANCE, "peaker", 1)
        assert container.constraint("RampUp::peaker::1").rhs_params[start] == pytest.approx(0.3)
        assert container.constraint("RampDown::peaker::1").rhs_params[stop] == pytest.approx(1.0)
        assert not container.has_parameter(ParamKey(ParameterKind.FEEDFORWARD_START_ALLOWANCE, "cheap", 1))

    def test_start_above_ramp_limit(self, small_system):
        container = dispatch(slow_peaker(small_system), load=1.3)
        attach_feedforward(container, semicontinuous(), small_system)
        assert refresh_transition_allowances(container) == 4
        assert allowance(container, ParameterKind.FEEDFORWARD_START_ALLOWANCE, 1) == 1.0
        assert allowance(container, ParameterKind.FEEDFORWARD_START_ALLOWANCE, 2) == 0.0
        result = BundledSolver().solve_lp(container)
        assert result.status is SolveStatus.OPTIMAL
        for t in (1, 2):
            assert power(result, "peaker", t) == pytest.approx(0.3)
            assert power(result, "cheap", t) == pytest.approx(1.0)
        assert result.objective == pytest.approx(2 * (1000.0 + 5000.0 * 0.3))

    def test_stop_from_full_output(self, small_system):
        system = slow_peaker(small_system, initial_on=True, initial_power=1.0, initial_duration=4.0)
        container = dispatch(system)
        attach_feedforward(container, semicontinuous(), system)
        for t in (1, 2):
            container.update_parameter(ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, "peaker", t), 0.0)
        refresh_transition_allowances(container)
        assert allowance(container, ParameterKind.FEEDFORWARD_STOP_ALLOWANCE, 1) == 1.0
        assert allowance(container, ParameterKind.FEEDFORWARD_STOP_ALLOWANCE, 2) == 0.0
        result = BundledSolver().solve_lp(container)
        assert power(result, "peaker") == pytest.approx(0.0, abs=1e-9)
        assert power(result, "cheap", 2) == pytest.approx(0.9)

    def test_held_status_keeps_ramp_limits(self, small_system):
        system = slow_peaker(small_system, initial_on=True, initial_power=1.0, initial_duration=4.0)
        container = dispatch(system, load=1.2)
        attach_feedforward(container, semicontinuous(), system)
        refresh_transition_allowances(container)
        result = BundledSolver().solve_lp(container)
        assert power(result, "peaker", 1) == pytest.approx(0.9)
        assert power(result, "peaker", 2) == pytest.approx(0.8)

    def test_follow_committed_statuses(self, small_system):
        system = slow_peaker(small_system)
        container = dispatch(system)
        spec = semicontinuous()
        attach_feedforward(container, spec, system)
        model = SimpleNamespace(name="ED", system=system, container=container, resolution=HOUR, feedforwards=[spec])
        state = SimulationState(START, HOUR, START + 6 * HOUR)
        state.write_decision("UC", VariableKind.ON_STATUS, "peaker", START, HOUR, np.array([0.0, 1.0, 0.0]), 3, 1)
        state.write_decision("UC", VariableKind.ON_STATUS, "cheap", START, HOUR, np.array([1.0, 1.0, 1.0]), 3, 1)
        assert update_feedforward_params(model, state, START) == 8
        assert allowance(container, ParameterKind.FEEDFORWARD_START_ALLOWANCE, 1) == 0.0
        assert allowance(container, ParameterKind.FEEDFORWARD_START_ALLOWANCE, 2) == 1.0
        update_feedforward_params(model, state, START + HOUR)
        assert allowance(container, ParameterKind.FEEDFORWARD_START_ALLOWANCE, 1) == 1.0
        assert allowance(container, ParameterKind.FEEDFORWARD_STOP_ALLOWANCE, 2) == 1.0


class TestBounds:
    def test_upper_bound_starts_at_static_limit(self, small_system):
        container = dispatch(small_system)
        spec = FeedforwardSpec("UpperBound", "UC", "ED", ("cheap",))
        attach_feedforward(container, spec, small_system)
        key = ParamKey(ParameterKind.FEEDFORWARD_UPPER, "cheap", 1)
        assert container.parameter_value(key) == container.variable(VarKey(VariableKind.ACTIVE_POWER, "cheap", 1)).ub
        row = container.constraint("FeedforwardUpperBound::cheap::1")
        assert row.sense is Sense.LE
        container.update_parameter(key, 0.5)
        result = BundledSolver().solve_lp(container)
        assert power(result, "cheap") == pytest.approx(0.5)
        assert power(result, "peaker") == pytest.approx(0.4)

    def test_lower_bound_on_open_variable(self, small_system):
        container = OptimizationContainer("ED")
        container.add_variable(VarKey(VariableKind.ACTIVE_POWER, "cheap", 1), -math.inf, 10.0)
        attach_feedforward(container, FeedforwardSpec("LowerBound", "UC", "ED", ("cheap",)), small_system)
        key = ParamKey(ParameterKind.FEEDFORWARD_LOWER, "cheap", 1)
        assert container.parameter_value(key) == -1e6
        assert container.constraint("FeedforwardLowerBound::cheap::1").sense is Sense.GE

    def test_bad_direction(self, small_system):
        spec = FeedforwardSpec("UpperBound", "UC", "ED", ("cheap",))
        with pytest.raises(FeedforwardError, match="direction"):
            attach_bound(dispatch(small_system), spec, small_system, "sideways")

    def test_missing_target_variable(self, small_system):
        spec = FeedforwardSpec("UpperBound", "UC", "ED", ("cheap",))
        with pytest.raises(FeedforwardError, match="missing for 'cheap'"):
            attach_feedforward(OptimizationContainer("ED"), spec, small_system)


def test_energy_target_is_soft(five_bus_case):
    system = load_system(five_bus_case.descriptor)
    container = OptimizationContainer("ED")
    for t in (1, 2):
        container.add_variable(VarKey(VariableKind.SOC, "Battery", t), 0.0, 1.0)
    spec = FeedforwardSpec("EnergyTarget", "UC", "ED", ("Storage",))
    attach_feedforward(container, spec, system)
    key = ParamKey(ParameterKind.ENERGY_TARGET, "Battery", 2)
    assert container.constraint("FeedforwardEnergyTarget::Battery::2").rhs_params == {key: 1.0}
    assert not container.has_parameter(ParamKey(ParameterKind.ENERGY_TARGET, "Battery", 1))
    solver = BundledSolver()
    container.update_parameter(key, 0.8)
    assert solver.solve_lp(container).objective == pytest.approx(0.0, abs=1e-9)
    container.update_parameter(key, 1.5)
    short = solver.solve_lp(container)
    assert short.primal[VarKey(VariableKind.ENERGY_SHORTAGE, "Battery", 2)] == pytest.approx(0.5)
    assert short.objective == pytest.approx(0.5 * 1e4 * 100.0)


class TestUpdate:
    def target(self, system):
        container = dispatch(system)
        spec = semicontinuous()
        attach_feedforward(container, spec, system)
        return SimpleNamespace(name="ED", system=system, container=container, resolution=HOUR, feedforwards=[spec])

    def test_statuses_are_rounded(self, small_system):
        model = self.target(small_system)
        state = SimulationState(START, HOUR, START + 6 * HOUR)
        state.write_decision("UC", VariableKind.ON_STATUS, "peaker", START, HOUR, np.array([0.3, 0.5, 0.7]), 3, 1)
        state.write_decision("UC", VariableKind.ON_STATUS, "cheap", START, HOUR, np.array([1.0, 1.0, 1.0]), 3, 1)
        assert update_feedforward_params(model, state, START) == 4
        values = model.container.parameters_of_kind(ParameterKind.FEEDFORWARD_ON_STATUS)
        assert values[ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, "peaker", 1)] == 0.0
        assert values[ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, "peaker", 2)] == 0.0
        update_feedforward_params(model, state, START + HOUR)
        values = model.container.parameters_of_kind(ParameterKind.FEEDFORWARD_ON_STATUS)
        assert values[ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, "peaker", 2)] == 1.0

    def test_lookahead_values_feed_later_steps(self, small_system):
        model = self.target(small_system)
        state = SimulationState(START, HOUR, START + 6 * HOUR)
        for unit in ("cheap", "peaker"):
            state.write_decision("UC", VariableKind.ON_STATUS, unit, START, HOUR, np.array([1.0, 0.0]), 1, 1)
        update_feedforward_params(model, state, START)
        assert model.container.parameter_value(ParamKey(ParameterKind.FEEDFORWARD_ON_STATUS, "cheap", 2)) == 0.0

    def test_gap_raises(self, small_system):
        model = self.target(small_system)
        state = SimulationState(START, HOUR, START + 6 * HOUR)
        state.write_decision("UC", VariableKind.ON_STATUS, "peaker", START, HOUR, np.array([1.0, 1.0]), 2, 1)
        with pytest.raises(FeedforwardGapError, match="for 'cheap'"):
            update_feedforward_params(model, state, START)


class TestSpec:
    def test_defaults_from_kind(self):
        spec = semicontinuous()
        assert (spec.source_variable, spec.target_variable) == ("OnStatus", "ActivePower")
        assert spec.components == ("ThermalGen",)
        assert spec.parameter_kind == ParameterKind.FEEDFORWARD_ON_STATUS
        assert FeedforwardSpec.from_mapping(spec.to_mapping()) == spec

    def test_component_resolution(self, small_system):
        assert semicontinuous().resolve_components(small_system) == ["cheap", "peaker"]
        with pytest.raises(FeedforwardError, match="unknown component 'ghost'"):
            semicontinuous(["ghost"]).resolve_components(small_system)

    def test_unknown_kind(self):
        with pytest.raises(FeedforwardError):
            FeedforwardSpec("Teleport", "UC", "ED", ("cheap",))
