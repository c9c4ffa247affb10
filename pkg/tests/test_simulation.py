"""End-to-end simulations: build, execute, failure handling and results."""

import json

import numpy as np
import pytest
from conftest import HOUR, START, two_unit_system

from src.config import ConfigManager
from src.feedforwards import FeedforwardSpec
from src.formulations import ProblemTemplate
from src.optimization.keys import INITIAL_CONDITION_KINDS
from src.problems.decision import update_decision_model
from src.sequence import INTER_PROBLEM, INTRA_PROBLEM, SequenceValidationError
from src.simulation import (
    EmulatorDefinition,
    ModelDefinition,
    Simulation,
    SimulationError,
    SimulationStateError,
    SimulationStatus,
    build_simulation,
    execute_simulation,
    load_results,
    run_simulation,
    simulation_from_config,
)
from src.solver import HighsSolver
from src.store import PARAMETER, StoreConfig
from src.system.cases import write_five_bus_case
from src.system.timeseries import Forecast

UC_TEMPLATE = ProblemTemplate(devices={"ThermalGen": "ThermalStandardUnitCommitment", "Load": "StaticPowerLoad"})
ED_TEMPLATE = ProblemTemplate(
    use_slacks=True, devices={"ThermalGen": "ThermalBasicDispatch", "Load": "StaticPowerLoad"}
)
STRICT_ED = ProblemTemplate(devices={"ThermalGen": "ThermalBasicDispatch", "Load": "StaticPowerLoad"})
LIGHT_LOAD = (0.6, 0.7, 0.8, 0.9)


def three_model_simulation(output_dir, **options):
    """UC every 2h, ED and the emulator hourly, over 4 hours of a light load."""
    feedforwards = [
        FeedforwardSpec("SemiContinuous", "UC", target, ("ThermalGen",)) for target in ("ED", "Emulator")
    ]
    return Simulation(
        system=two_unit_system(LIGHT_LOAD),
        models=[
            ModelDefinition("UC", UC_TEMPLATE, 4, HOUR, 2 * HOUR),
            ModelDefinition("ED", ED_TEMPLATE, 2, HOUR, HOUR),
        ],
        emulator=EmulatorDefinition("Emulator", ED_TEMPLATE, HOUR),
        start=START,
        steps=2,
        output_dir=output_dir,
        feedforwards=feedforwards,
        **options,
    )


def dispatch_only(output_dir, windows, **options):
    """A lone ED model on hand-written load forecast windows, no emulator."""
    system = two_unit_system()
    system.time_series.add_forecast(
        Forecast("load", "max_active_power", HOUR, HOUR, 2, {START + i * HOUR: np.array(w) for i, w in enumerate(windows)})
    )
    return Simulation(
        system=system,
        models=[ModelDefinition("ED", STRICT_ED, 2, HOUR, HOUR)],
        emulator=None,
        start=START,
        steps=len(windows),
        output_dir=output_dir,
        **options,
    )


def five_bus_run(tmp_path, name, **options):
    """Write a five-bus case under ``tmp_path/name`` and run it to the end."""
    case = write_five_bus_case(tmp_path / name, **options)
    sim = simulation_from_config(ConfigManager(case.config))
    return sim, run_simulation(sim)


class TestSmallSimulation:
    def test_runs_every_execution(self, tmp_path):
        sim = three_model_simulation(tmp_path / "out", resolved_config={"name": "small"})
        results = run_simulation(sim)
        assert sim.status is SimulationStatus.FINISHED
        assert sim.order.counts() == {"UC": 2, "ED": 4, "Emulator": 4}
        assert sim.solves == 10
        assert sim.container_builds == 3
        assert results.models() == ["ED", "Emulator", "UC"]
        emulated = results.realized("Emulator", "ActivePower")
        np.testing.assert_allclose(emulated["cheap"].to_numpy(), LIGHT_LOAD, atol=1e-9)
        np.testing.assert_allclose(emulated["peaker"].to_numpy(), 0.0, atol=1e-9)
        objective = results.read_result("Emulator", "auxiliary", "ObjectiveValue", START)
        assert objective[0, 0] == pytest.approx(600.0)
        assert len(results.realized("UC", "OnStatus")) == 4
        assert len(results.lookahead("UC", "OnStatus")[START]) == 4

    def test_writes_containers_and_resolved_config(self, tmp_path):
        out = tmp_path / "out"
        sim = build_simulation(three_model_simulation(out, resolved_config={"name": "small"}))
        assert sim.status is SimulationStatus.BUILT
        assert sorted(p.name for p in (out / "containers").iterdir()) == ["ED.json", "Emulator.json", "UC.json"]
        assert json.loads((out / "config_resolved.json").read_text()) == {"name": "small"}
        assert sim.relaxed_initializations == 0
        assert sim.state.resolution == HOUR

    def test_results_are_deterministic(self, tmp_path):
        for name in ("a", "b"):
            run_simulation(three_model_simulation(tmp_path / name)).close()
        first = (tmp_path / "a" / "store" / "results.opsim").read_bytes()
        assert first == (tmp_path / "b" / "store" / "results.opsim").read_bytes()

    def test_reload_from_disk(self, tmp_path):
        run_simulation(three_model_simulation(tmp_path / "out"))
        results = load_results(tmp_path / "out")
        assert results.execution_times("ED", "ActivePower") == [START + h * HOUR for h in range(4)]
        frame = results.frame("ED", "ActivePower", include_lookahead=False)
        assert len(frame) == 4 * 2
        path = results.export("Emulator", "ActivePower", tmp_path / "emulator.csv")
        assert path.read_text().splitlines()[0] == "execution_time,horizon_step,component,value,realized_flag"

    def test_memory_backend(self, tmp_path):
        results = run_simulation(three_model_simulation(tmp_path / "out", store_config=StoreConfig(backend="memory")))
        assert len(results.realized("ED", "ActivePower")) == 4
        assert not (tmp_path / "out" / "store").exists()


class TestLifecycle:
    def test_transitions(self, tmp_path):
        sim = three_model_simulation(tmp_path / "out")
        with pytest.raises(SimulationStateError):
            execute_simulation(sim)
        with pytest.raises(SimulationStateError):
            sim.advance(SimulationStatus.RUNNING)
        build_simulation(sim)
        with pytest.raises(SimulationError, match="already built"):
            build_simulation(sim)

    def test_unknown_policy(self, tmp_path):
        with pytest.raises(ValueError):
            three_model_simulation(tmp_path, on_infeasible="retry")

    def test_invalid_sequence_builds_nothing(self, tmp_path):
        sim = dispatch_only(tmp_path / "out", [[0.5, 0.5]])
        sim.models = [ModelDefinition("ED", STRICT_ED, 3, HOUR, HOUR)]
        with pytest.raises(SequenceValidationError):
            build_simulation(sim)
        assert sim.status is SimulationStatus.FAILED
        assert not (tmp_path / "out" / "containers").exists()


class TestInfeasibility:
    def test_halt_dumps_diagnostics(self, tmp_path):
        sim = dispatch_only(tmp_path / "out", [[0.5, 0.5], [2.5, 2.5]])
        with pytest.raises(SimulationError) as excinfo:
            run_simulation(sim)
        assert sim.status is SimulationStatus.FAILED
        diagnostics = excinfo.value.diagnostics
        assert diagnostics == tmp_path / "out" / "diagnostics" / "ED_20240101T010000"
        failure = json.loads((diagnostics / "failure.json").read_text())
        assert failure["model"] == "ED"
        assert failure["issue_time"] == "2024-01-01T01:00:00"
        for name in ("container.json", "state.json", "parameters.json"):
            assert (diagnostics / name).is_file()
        results = load_results(tmp_path / "out")
        assert results.execution_times("ED", "ActivePower") == [START]

    def test_skip_and_carry(self, tmp_path):
        sim = dispatch_only(tmp_path / "out", [[0.5, 0.7], [2.5, 2.5]], on_infeasible="skip_and_carry")
        results = run_simulation(sim)
        assert sim.status is SimulationStatus.FINISHED
        assert (sim.solves, sim.skipped) == (1, 1)
        assert results.execution_times("ED", "ActivePower") == [START]
        carried = sim.state.decision_series("ED", "ActivePower", "cheap")
        assert carried.values[2] == pytest.approx(0.6)
        assert carried.horizon_step[2] == 2

    def test_first_execution_cannot_carry(self, tmp_path):
        sim = dispatch_only(tmp_path / "out", [[2.5, 2.5]], on_infeasible="skip_and_carry")
        with pytest.raises(SimulationError, match="execution of 'ED'"):
            run_simulation(sim)


class TestFiveBus:
    def test_one_day(self, tmp_path):
        case = write_five_bus_case(tmp_path / "case", days=1)
        sim = simulation_from_config(ConfigManager(case.config))
        assert sim.models[0].solver.engine == "bundled"
        run_simulation(sim)
        assert sim.order.counts() == {"UC": 1, "ED": 24, "Emulator": 24}
        results = load_results(sim.output_dir)
        realized = results.realized("ED", "ActivePower")
        assert len(realized) == 24
        assert realized.index[-1] == START + 23 * HOUR
        commitment = results.read_result("UC", "variable", "OnStatus", START)
        assert commitment.shape == (48, 5)
        assert set(np.round(commitment, 6).ravel()) <= {0.0, 1.0}
        assert (sim.output_dir / "config_resolved.json").is_file()

    def test_day_ahead_commitment_on_default_engine(self, tmp_path):
        case = write_five_bus_case(tmp_path / "case", days=1)
        sim = build_simulation(simulation_from_config(ConfigManager(case.config)))
        uc = sim.sequence.get_model("UC")
        assert uc.solver.name == "bundled"
        update_decision_model(uc, START, sim.state)
        bundled = uc.solver.solve(uc.container)
        reference = HighsSolver().solve(uc.container)
        assert bundled.is_optimal
        assert bundled.objective >= reference.objective - 1e-6 * abs(reference.objective)
        assert bundled.objective <= reference.objective * 1.02

    def test_three_days_stay_consistent(self, tmp_path):
        sim, results = five_bus_run(tmp_path, "case", days=3)
        assert sim.order.counts() == {"UC": 3, "ED": 72, "Emulator": 72}
        power = results.realized("Emulator", "ActivePower")
        assert len(power) == 72
        charge = results.realized("Emulator", "ActivePowerIn")["Battery"].to_numpy()
        discharge = results.realized("Emulator", "ActivePowerOut")["Battery"].to_numpy()
        short = results.realized("Emulator", "BalanceSlackUp")["system"].to_numpy()
        spill = results.realized("Emulator", "BalanceSlackDown")["system"].to_numpy()
        bounds = results.realized("Emulator", "ForecastBound", kind=PARAMETER)
        demand = sum(load.peak * bounds[name].to_numpy() for name, load in sim.system.loads.items())
        residual = power.sum(axis=1).to_numpy() + discharge - charge + short - spill - demand
        assert np.abs(residual).max() <= 1e-6

        status = results.realized("UC", "OnStatus").loc[power.index]
        for model in ("ED", "Emulator"):
            dispatch = results.realized(model, "ActivePower")
            for name, gen in sim.system.thermal_gens.items():
                on = status[name].to_numpy() > 0.5
                p = dispatch[name].to_numpy()
                np.testing.assert_allclose(p[~on], 0.0, atol=1e-6)
                assert np.all(p[on] >= gen.p_min - 1e-6)
                assert np.all(p[on] <= gen.p_max + 1e-6)

        for name, gen in sim.system.thermal_gens.items():
            on = status[name].to_numpy() > 0.5
            held = on[1:] & on[:-1]
            moves = np.diff(power[name].to_numpy())[held]
            assert moves.max(initial=0.0) <= gen.ramp_up + 1e-6
            assert (-moves).max(initial=0.0) <= gen.ramp_down + 1e-6

        battery = sim.system.storage["Battery"]
        soc = results.realized("Emulator", "SoC")["Battery"].to_numpy()
        previous = np.concatenate([[battery.initial_soc], soc[:-1]])
        stored = previous + battery.charge_efficiency * charge - discharge / battery.discharge_efficiency
        np.testing.assert_allclose(soc, stored, atol=1e-6)

    def test_missing_initial_conditions_are_relaxed(self, tmp_path):
        case = write_five_bus_case(tmp_path / "case", days=1, include_initial_conditions=False)
        sim = build_simulation(simulation_from_config(ConfigManager(case.config)))
        assert sim.relaxed_initializations == 1
        ic = sim.state.initial_conditions
        assert set(ic.on_status) == set(sim.system.thermal_gens)
        assert set(ic.soc) == {"Battery"}

    def test_missing_output(self, tmp_path):
        with pytest.raises(SimulationError, match="no simulation output directory"):
            load_results(tmp_path / "absent")
        (tmp_path / "empty").mkdir()
        with pytest.raises(SimulationError, match="no results store"):
            load_results(tmp_path / "empty")


class TestChronology:
    def record_initial_conditions(self, monkeypatch):
        """Initial-condition parameters of every ED update, in order."""
        stream = []

        def recording(model, issue_time, state, chronology=None):
            update_decision_model(model, issue_time, state, chronology)
            if model.name == "ED":
                values = {k: v for k, v in model.container.parameters.items() if k.kind in INITIAL_CONDITION_KINDS}
                stream.append(dict(sorted(values.items())))

        monkeypatch.setattr("src.simulation.execute.update_decision_model", recording)
        return stream

    def streams(self, tmp_path, monkeypatch, noise):
        streams = {}
        for chronology in (INTER_PROBLEM, INTRA_PROBLEM):
            stream = self.record_initial_conditions(monkeypatch)
            five_bus_run(
                tmp_path, chronology, days=1, ed_horizon=1, forecast_error=0.0,
                realization_noise=noise, chronology=chronology,
            )
            assert len(stream) == 24
            streams[chronology] = stream
        return streams[INTER_PROBLEM], streams[INTRA_PROBLEM]

    def test_equal_data_gives_equal_initial_conditions(self, tmp_path, monkeypatch):
        inter, intra = self.streams(tmp_path, monkeypatch, noise=0.0)
        for a, b in zip(inter, intra):
            assert list(a) == list(b)
            np.testing.assert_allclose(list(a.values()), list(b.values()), rtol=0.0, atol=1e-8)

    def test_perturbed_actuals_split_the_streams(self, tmp_path, monkeypatch):
        inter, intra = self.streams(tmp_path, monkeypatch, noise=0.01)
        assert inter[0] == intra[0]
        gaps = [max(abs(a[k] - b[k]) for k in a) for a, b in zip(inter, intra)]
        assert max(gaps) > 1e-6

