"""Simulation state, chronologies, timing rules, execution order and validation."""

from datetime import timedelta
from types import SimpleNamespace

import numpy as np
import pytest
from conftest import HOUR, START

from src.config import ConfigManager
from src.feedforwards import FeedforwardSpec
from src.formulations import ProblemTemplate, descriptor_initial_conditions
from src.optimization import VariableKind
from src.sequence import (
    DECISION,
    EMULATION,
    INTER_PROBLEM,
    INTRA_PROBLEM,
    ColdStartError,
    SequenceValidationError,
    SimulationSequence,
    SimulationSpan,
    SimulationState,
    StateError,
    TimingError,
    check_model_timing,
    compute_execution_order,
    format_duration,
    get_initial_conditions,
    grid_resolution,
    update_state,
    validate_sequence,
)
from src.simulation.simulation import EmulatorDefinition, ModelDefinition, simulation_from_config
from src.system.components import InitialConditions

ED_TEMPLATE = ProblemTemplate(devices={"ThermalGen": "ThermalBasicDispatch", "Load": "StaticPowerLoad"})
UC_TEMPLATE = ProblemTemplate(devices={"ThermalGen": "ThermalStandardUnitCommitment", "Load": "StaticPowerLoad"})


def model(name, horizon=4, resolution=HOUR, interval=HOUR, template=ED_TEMPLATE):
    return ModelDefinition(name, template, horizon, resolution, interval)


def solution(model_name, issue_time, trajectories, realized_steps=1, execution=1):
    return SimpleNamespace(
        model=model_name,
        issue_time=issue_time,
        resolution=HOUR,
        realized_steps=realized_steps,
        execution=execution,
        trajectories={key: np.asarray(values, dtype=float) for key, values in trajectories.items()},
    )


class TestState:
    def test_slots(self):
        state = SimulationState(START, HOUR, START + 4 * HOUR)
        assert state.n_slots == 5
        assert state.slot(START - HOUR) == 0
        assert state.slot(START) == 1
        assert state.slot(START + 3 * HOUR) == 4
        assert state.time_of(4) == START + 3 * HOUR
        with pytest.raises(StateError, match="off the 1h state grid"):
            state.slot(START + timedelta(minutes=30))
        with pytest.raises(StateError, match="outside"):
            state.slot(START + 4 * HOUR)
        assert state.slot_or_none(START + 4 * HOUR) is None

    def test_bad_resolution(self):
        with pytest.raises(StateError):
            SimulationState(START, timedelta(0), START + HOUR)

    def test_coarse_decisions_are_held_on_fine_slots(self):
        state = SimulationState(START, HOUR, START + 6 * HOUR)
        state.write_decision("UC", "OnStatus", "g", START, 2 * HOUR, np.array([1.0, 0.0]), 1, 7)
        series = state.decision_series("UC", "OnStatus", "g")
        assert series.values[1:3].tolist() == [1.0, 1.0]
        assert series.writer[1:3].tolist() == [7, 7]
        assert np.isnan(series.values[3])
        assert state.read_decision("UC", "OnStatus", "g", START + HOUR) == 1.0
        assert state.read_decision("UC", "OnStatus", "g", START + 2 * HOUR) == 0.0
        assert np.isnan(state.read_decision("UC", "OnStatus", "other", START))
        assert state.writes == 1

    def test_promote_lookahead(self):
        state = SimulationState(START, HOUR, START + 6 * HOUR)
        state.write_decision("UC", "ActivePower", "g", START, HOUR, np.array([1.0, 2.0, 3.0]), 1, 1)
        assert state.promote_lookahead("UC", START + HOUR, 2 * HOUR, 4) == 2
        series = state.decision_series("UC", "ActivePower", "g")
        assert series.values[1:4].tolist() == [1.0, 2.0, 3.0]
        assert series.writer[1:4].tolist() == [1, 4, 4]
        assert series.horizon_step[1:4].tolist() == [1, 2, 3]
        assert state.realized_horizon_steps("UC") == 3

    def test_system_reads_ignore_lookahead(self):
        state = SimulationState(START, HOUR, START + 4 * HOUR)
        state.allocate_system("SoC", ["bat"])
        state.system_series("SoC", "bat").lookahead[1] = 0.5
        assert np.isnan(state.read_system("SoC", "bat", START))
        with pytest.raises(StateError):
            state.system_series("SoC", "ghost")

    def test_status_duration_counts_back_into_initial(self):
        state = SimulationState(START, HOUR, START + 4 * HOUR)
        state.set_initial(InitialConditions(on_status={"g": True}, power={"g": 1.0}, duration={"g": 3.0}), ["UC"])
        assert state.decision_series("UC", "OnStatus", "g").values[0] == 1.0
        state.write_system("OnStatus", "g", START, HOUR, 1.0, 1)
        state.write_system("OnStatus", "g", START + HOUR, HOUR, 0.0, 2)
        series = state.system_series("OnStatus", "g")
        assert state.status_duration(series, 1, "g") == 4.0
        assert state.status_duration(series, 2, "g") == 1.0

    def test_snapshot(self):
        state = SimulationState(START, HOUR, START + 2 * HOUR)
        state.write_system("SoC", "bat", START, HOUR, 0.25, 1)
        snapshot = state.snapshot()
        assert snapshot["resolution"] == "1h"
        assert snapshot["system"]["SoC/bat"] == [None, 0.25, None]


class TestChronology:
    def start_state(self, system):
        state = SimulationState(START, HOUR, START + 8 * HOUR)
        state.set_initial(descriptor_initial_conditions(system), ["ED"])
        return state

    def test_first_execution_reads_descriptor_values(self, small_system):
        ed = SimpleNamespace(name="ED", system=small_system)
        state = self.start_state(small_system)
        for chronology in (INTER_PROBLEM, INTRA_PROBLEM):
            ic = get_initial_conditions(ed, START, state, chronology)
            assert ic.on_status == {"cheap": True, "peaker": False}
            assert ic.power["cheap"] == 0.5
            assert ic.duration == {"cheap": 4.0, "peaker": 4.0}

    def test_inter_problem_follows_system_state(self, small_system):
        ed = SimpleNamespace(name="ED", system=small_system)
        state = self.start_state(small_system)
        emulated = {
            ("OnStatus", "cheap"): [1.0],
            ("ActivePower", "cheap"): [0.7],
            ("OnStatus", "peaker"): [1.0],
            ("ActivePower", "peaker"): [0.2],
        }
        update_state(state, solution("Emulator", START, emulated), EMULATION)
        ic = get_initial_conditions(ed, START + HOUR, state, INTER_PROBLEM)
        assert ic.power == {"cheap": 0.7, "peaker": 0.2}
        assert ic.on_status["peaker"] is True
        assert ic.duration == {"cheap": 5.0, "peaker": 1.0}
        with pytest.raises(ColdStartError, match="decisions of 'ED'"):
            get_initial_conditions(ed, START + HOUR, state, INTRA_PROBLEM)

    def test_intra_problem_follows_own_decisions(self, small_system):
        ed = SimpleNamespace(name="ED", system=small_system)
        state = self.start_state(small_system)
        decided = {
            ("OnStatus", "cheap"): [1.0, 1.0],
            ("ActivePower", "cheap"): [0.6, 0.9],
            ("OnStatus", "peaker"): [0.0, 0.0],
            ("ActivePower", "peaker"): [0.0, 0.0],
        }
        update_state(state, solution("ED", START, decided), DECISION)
        ic = get_initial_conditions(ed, START + HOUR, state, INTRA_PROBLEM)
        assert ic.power["cheap"] == 0.6
        assert ic.duration["peaker"] == 5.0
        with pytest.raises(ColdStartError, match="system state"):
            get_initial_conditions(ed, START + HOUR, state, INTER_PROBLEM)

    def test_innermost_decisions_can_write_system_state(self, small_system):
        state = self.start_state(small_system)
        update_state(state, solution("ED", START, {("ActivePower", "cheap"): [0.6, 0.9]}), DECISION, writes_system=True)
        assert state.read_system("ActivePower", "cheap", START) == 0.6
        assert np.isnan(state.read_system("ActivePower", "cheap", START + HOUR))

    def test_unknown_names(self, small_system):
        state = self.start_state(small_system)
        with pytest.raises(ValueError):
            get_initial_conditions(SimpleNamespace(name="ED", system=small_system), START, state, "Sideways")
        with pytest.raises(ValueError):
            update_state(state, solution("ED", START, {}), "guess")


class TestTiming:
    def test_model_rules(self):
        check_model_timing("UC", 48, HOUR, 24 * HOUR)
        with pytest.raises(TimingError, match="horizon must be a positive"):
            check_model_timing("UC", 0, HOUR, HOUR)
        with pytest.raises(TimingError, match="interval not multiple of resolution"):
            check_model_timing("UC", 4, 2 * HOUR, 3 * HOUR)
        with pytest.raises(TimingError, match="horizon shorter than interval"):
            check_model_timing("ED", 2, HOUR, 24 * HOUR)

    def test_grid_and_text(self):
        assert grid_resolution([24 * HOUR, HOUR, timedelta(minutes=15)]) == timedelta(minutes=15)
        assert format_duration(timedelta(minutes=90)) == "90min"
        span = SimulationSpan(START, 3, 24 * HOUR)
        assert span.end == START + 72 * HOUR
        assert span.step_start(2) == START + 24 * HOUR


class TestExecutionOrder:
    def sequence(self):
        return SimulationSequence(
            models=[model("UC", 48, interval=24 * HOUR, template=UC_TEMPLATE), model("ED", 2)],
            emulator=EmulatorDefinition("Emulator", ED_TEMPLATE, HOUR),
        )

    def test_counts_and_interleaving(self):
        order = compute_execution_order(self.sequence(), SimulationSpan(START, 2, 24 * HOUR))
        assert order.counts() == {"UC": 2, "ED": 48, "Emulator": 48}
        assert len(order) == 98
        first = order.for_step(1)
        assert [(e.model, e.issue_time) for e in first[:4]] == [
            ("UC", START),
            ("ED", START),
            ("Emulator", START),
            ("ED", START + HOUR),
        ]
        assert first[2].emulation
        second = order.for_step(2)[0]
        assert (second.model, second.issue_time, second.step) == ("UC", START + 24 * HOUR, 2)

    def test_sequence_lookups(self):
        seq = self.sequence()
        assert seq.model_names == ["UC", "ED", "Emulator"]
        assert seq.state_writer.name == "Emulator"
        assert seq.rank("ED") == 1
        assert seq.chronology_for(seq.outermost) == INTER_PROBLEM
        with pytest.raises(KeyError):
            seq.get_model("RT")
        assert SimulationSequence(models=seq.models).state_writer.name == "ED"


class TestValidation:
    def test_five_bus_sequence(self, five_bus_case):
        sim = simulation_from_config(ConfigManager(five_bus_case.config))
        span = SimulationSpan(sim.start, sim.steps, sim.models[0].interval)
        report = validate_sequence(sim.definition_sequence(), sim.system, span)
        assert report.ok
        assert report.executions_per_step == {"UC": 1, "ED": 24, "Emulator": 24}

    def test_small_sequence_is_valid(self, small_system):
        seq = SimulationSequence(models=[model("UC", 4, interval=2 * HOUR, template=UC_TEMPLATE), model("ED")])
        report = validate_sequence(seq, small_system, SimulationSpan(START, 2, 2 * HOUR))
        assert report.executions_per_step == {"UC": 1, "ED": 2}

    def findings(self, seq, system, span):
        with pytest.raises(SequenceValidationError) as excinfo:
            validate_sequence(seq, system, span)
        return excinfo.value.findings

    def test_forecast_findings(self, small_system):
        too_long = SimulationSequence(models=[model("ED", horizon=6)])
        [finding] = self.findings(too_long, small_system, SimulationSpan(START, 4, HOUR))
        assert "forecast windows hold 4 steps, model horizon needs 6" in finding
        uncovered = SimulationSequence(models=[model("ED")])
        [finding] = self.findings(uncovered, small_system, SimulationSpan(START, 6, HOUR))
        assert "insufficient forecast coverage" in finding
        assert "2 of 6 issue times missing" in finding

    def test_timing_findings(self, small_system):
        seq = SimulationSequence(
            models=[model("UC", 4, interval=3 * HOUR), model("ED", interval=2 * HOUR, resolution=2 * HOUR)],
            emulator=EmulatorDefinition("Emulator", ED_TEMPLATE, timedelta(minutes=90)),
        )
        findings = self.findings(seq, small_system, SimulationSpan(START, 1, 2 * HOUR))
        assert any("does not divide 3h" in f for f in findings)
        assert any("emulator resolution 90min" in f for f in findings)
        assert any("differs from the outermost interval 3h" in f for f in findings)

    def test_feedforward_findings(self, small_system):
        seq = SimulationSequence(
            models=[model("UC", 4, interval=2 * HOUR, template=UC_TEMPLATE), model("ED")],
            emulator=EmulatorDefinition("Emulator", ED_TEMPLATE, HOUR),
            feedforwards=[
                FeedforwardSpec("SemiContinuous", "ED", "UC", ("ThermalGen",)),
                FeedforwardSpec("UpperBound", "Emulator", "ED", ("cheap",)),
                FeedforwardSpec("UpperBound", "UC", "RT", ("cheap",)),
                FeedforwardSpec("UpperBound", "UC", "ED", ("ghost",)),
            ],
        )
        findings = self.findings(seq, small_system, SimulationSpan(START, 2, 2 * HOUR))
        assert findings == [
            "SemiContinuous feedforward ED -> UC: source must execute before target",
            "UpperBound feedforward Emulator -> ED: the emulator cannot feed other models",
            "UpperBound feedforward UC -> RT: unknown model",
            "UpperBound feedforward UC->ED names unknown component 'ghost'",
        ]

    def test_empty_sequence(self, small_system):
        with pytest.raises(SequenceValidationError, match="no decision models"):
            validate_sequence(SimulationSequence(models=[]), small_system, SimulationSpan(START, 1, HOUR))
