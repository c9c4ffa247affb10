"""Decision and emulation models: build, per-execution update and solve."""

from datetime import timedelta

import numpy as np
import pytest
from conftest import HOUR, START, two_unit_system

from src.formulations import ProblemTemplate, descriptor_initial_conditions
from src.optimization import ParameterKind, ParamKey
from src.problems.decision import build_decision_model, solve_decision_model, update_decision_model
from src.problems.emulation import build_emulation_model, run_emulation_step
from src.problems.errors import StaleStateError
from src.sequence import SimulationState, TimingError
from src.system.errors import ForecastNotFoundError, RealizationNotFoundError

UC_TEMPLATE = ProblemTemplate(devices={"ThermalGen": "ThermalStandardUnitCommitment", "Load": "StaticPowerLoad"})
ED_TEMPLATE = ProblemTemplate(devices={"ThermalGen": "ThermalBasicDispatch", "Load": "StaticPowerLoad"})


def initial_state(system, models):
    state = SimulationState(START, HOUR, START + 8 * HOUR)
    state.set_initial(descriptor_initial_conditions(system), models)
    return state


class TestDecisionModel:
    def test_build(self, small_system):
        model = build_decision_model("UC", UC_TEMPLATE, small_system, 4, HOUR, 2 * HOUR)
        assert model.realized_steps == 2
        assert model.dt == 1.0
        assert model.container.name == "UC"
        assert model.last_issue_time is None

    def test_build_checks_timing_and_data(self, small_system):
        with pytest.raises(TimingError, match="horizon shorter than interval"):
            build_decision_model("UC", UC_TEMPLATE, small_system, 1, HOUR, 2 * HOUR)
        with pytest.raises(ForecastNotFoundError, match="needs 30min"):
            build_decision_model("RT", ED_TEMPLATE, small_system, 4, timedelta(minutes=30), HOUR)

    def test_update_and_solve(self, small_system):
        model = build_decision_model("UC", UC_TEMPLATE, small_system, 4, HOUR, 2 * HOUR)
        with pytest.raises(StaleStateError):
            solve_decision_model(model)
        update_decision_model(model, START, initial_state(small_system, ["UC"]))
        assert model.container.parameter_value(ParamKey(ParameterKind.FORECAST_BOUND, "load", 3)) == 1.2
        solution = solve_decision_model(model, execution=5)
        assert solution.objective == pytest.approx(1000 * 3.3 + 5000 * 0.2 + 20.0, rel=1e-6)
        assert np.round(solution.realized("OnStatus", "peaker")).tolist() == [0.0, 0.0]
        assert np.round(solution.lookahead("OnStatus", "peaker")).tolist() == [1.0, 0.0]
        assert solution.timestamps[-1] == START + 3 * HOUR
        assert solution.execution == 5
        assert model.last_solution is solution

    def test_cannot_go_back_in_time(self, small_system):
        model = build_decision_model("UC", UC_TEMPLATE, small_system, 4, HOUR, 2 * HOUR)
        state = initial_state(small_system, ["UC"])
        update_decision_model(model, START, state, initial_conditions=descriptor_initial_conditions(small_system))
        with pytest.raises(StaleStateError, match="cannot go back"):
            update_decision_model(model, START - HOUR, state)


class TestEmulationModel:
    def test_step_uses_realized_load(self, small_system):
        model = build_emulation_model("Emulator", ED_TEMPLATE, small_system, HOUR)
        assert model.horizon_steps == 1
        assert model.interval == HOUR
        solution = run_emulation_step(model, START, initial_state(small_system, ["Emulator"]), execution=2)
        assert solution.trajectory("ActivePower", "cheap")[0] == pytest.approx(0.5)
        assert solution.trajectory("ActivePower", "peaker")[0] == pytest.approx(0.1)
        assert solution.objective == pytest.approx(1000.0)
        assert not solution.retried
        assert solution.slack == 0.0

    def test_infeasible_step_retries_with_slack(self):
        system = two_unit_system(load_profile=(2.5, 2.5, 2.5, 2.5))
        model = build_emulation_model("Emulator", ED_TEMPLATE, system, HOUR)
        solution = run_emulation_step(model, START, initial_state(system, ["Emulator"]))
        assert solution.retried
        assert model.retries == 1
        assert abs(solution.slack) == pytest.approx(0.5)

    def test_steps_move_forward(self, small_system):
        model = build_emulation_model("Emulator", ED_TEMPLATE, small_system, HOUR)
        state = initial_state(small_system, ["Emulator"])
        run_emulation_step(model, START, state)
        with pytest.raises(StaleStateError):
            run_emulation_step(model, START, state)

    def test_realization_grid_must_divide_resolution(self, small_system):
        with pytest.raises(RealizationNotFoundError, match="cannot feed emulator"):
            build_emulation_model("Emulator", ED_TEMPLATE, small_system, timedelta(minutes=30))
