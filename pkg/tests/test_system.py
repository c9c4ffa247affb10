"""System descriptor loading, validation and time-series lookups."""

import json
from datetime import timedelta

import numpy as np
import pytest
from conftest import HOUR, START, hourly_forecast, hourly_realization

from src.system.components import BusType
from src.system.errors import (
    ForecastNotFoundError,
    HorizonOverrunError,
    IssueTimeNotFoundError,
    OffGridError,
    OutOfRangeError,
    RealizationNotFoundError,
    SystemValidationError,
)
from src.system.loader import load_system
from src.system.system import SystemModel, get_forecast_window, get_realization
from src.system.timeseries import TimeSeriesRegistry


def rewrite(case, change):
    """Apply ``change`` to the descriptor document of ``case`` in place."""
    data = json.loads(case.descriptor.read_text())
    change(data)
    case.descriptor.write_text(json.dumps(data))
    return case.descriptor


class TestLoadSystem:
    def test_five_bus_case(self, five_bus_case):
        sys = load_system(five_bus_case.descriptor)
        assert sys.base_power == 100.0
        assert len(sys.buses) == 5
        assert len(sys.lines) == 6
        assert sys.slack_bus.name == "bus1"
        assert sys.buses["bus2"].bus_type is BusType.PQ
        assert sys.component_types_present() == ["ThermalGen", "RenewableGen", "Load", "Storage"]
        assert sys.has_complete_initial_conditions

    def test_per_unit_conversion(self, five_bus_case):
        sys = load_system(five_bus_case.descriptor)
        brighton = sys.thermal_gens["Brighton"]
        assert brighton.p_max == pytest.approx(6.0)
        assert brighton.initial_power == pytest.approx(3.0)
        assert sys.lines["line45"].rating == pytest.approx(2.4)
        assert sys.storage["Battery"].energy_capacity == pytest.approx(1.0)
        assert sys.reserves["SpinUp"].requirement == pytest.approx(0.5)

    def test_cost_curve_kept_in_mw(self, five_bus_case):
        solitude = load_system(five_bus_case.descriptor).thermal_gens["Solitude"]
        assert solitude.cost_curve[0] == (100.0, 2800.0)
        assert solitude.variable_cost == 0.0

    def test_forecasts_and_realizations_attached(self, five_bus_case):
        sys = load_system(five_bus_case.descriptor)
        window = get_forecast_window(sys, "LoadB", "max_active_power", START, 48)
        assert window.shape == (48,)
        assert not window.flags.writeable
        assert 0.0 < get_realization(sys, "Wind", "max_active_power", START + 5 * HOUR) <= 1.0
        assert sys.time_series.has_forecast("SpinUp", "requirement")

    def test_missing_initial_conditions(self, tmp_path):
        from src.system.cases import write_five_bus_case

        case = write_five_bus_case(tmp_path / "bare", days=1, include_initial_conditions=False)
        sys = load_system(case.descriptor)
        assert not sys.has_complete_initial_conditions
        assert sys.thermal_gens["Alta"].initial_on is None

    @pytest.mark.parametrize(
        "change, message",
        [
            (lambda d: d["buses"][1].update(bus_type="slack"), "exactly one slack bus required"),
            (lambda d: d["loads"][0].update(name="bus1"), "duplicate name"),
            (lambda d: d["loads"][0].update(bus="bus9"), "references unknown bus"),
            (lambda d: d["lines"][0].update(to_bus="bus1"), "self-loop line"),
            (lambda d: d["thermal_generators"][0].update(p_min=50.0), "exceeds p_max"),
            (
                lambda d: d["thermal_generators"][2].update(
                    variable_cost=[[100.0, 2800.0], [300.0, 20000.0], [520.0, 21000.0]]
                ),
                "convex",
            ),
            (
                lambda d: d["thermal_generators"][2].update(variable_cost=[[150.0, 2800.0], [520.0, 16060.0]]),
                "curve must span",
            ),
            (lambda d: d["thermal_generators"][0].update(initial_power=10.0), "initial_power must be 0 when"),
            (lambda d: d["thermal_generators"][0].update(min_up=1.5), "must be an integer"),
            (lambda d: d["thermal_generators"][0].update(initial_duration=0.5), "initial_duration"),
            (lambda d: d["storage"][0].update(initial_soc=500.0), "initial_soc"),
            (lambda d: d.update(extras=[]), "unknown sections"),
            (lambda d: d["reserves"][0].update(requirement_series="other"), "requirement series attached"),
        ],
    )
    def test_invalid_descriptors(self, five_bus_case, change, message):
        path = rewrite(five_bus_case, change)
        with pytest.raises(SystemValidationError, match=message):
            load_system(path)

    def test_unknown_series_column(self, five_bus_case):
        path = five_bus_case.directory / "timeseries" / "actuals.csv"
        text = path.read_text().replace("LoadB", "LoadZ", 1)
        path.write_text(text)
        with pytest.raises(SystemValidationError, match="does not name a component"):
            load_system(five_bus_case.descriptor)

    def test_missing_files(self, five_bus_case, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_system(tmp_path / "nope.json")
        (five_bus_case.directory / "timeseries" / "actuals.csv").unlink()
        with pytest.raises(FileNotFoundError):
            load_system(five_bus_case.descriptor)

    def test_unparseable_descriptor(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(SystemValidationError):
            load_system(path)


class TestTimeSeriesRegistry:
    def registry(self):
        registry = TimeSeriesRegistry(cache_entries=2)
        registry.add_forecast(hourly_forecast("load", np.arange(6.0), issues=3))
        registry.add_realization(hourly_realization("load", np.arange(10.0)))
        return registry

    def test_window_is_prefix_and_cached(self):
        registry = self.registry()
        first = registry.forecast_window("load", "max_active_power", START + HOUR, 4)
        np.testing.assert_array_equal(first, [0.0, 1.0, 2.0, 3.0])
        registry.forecast_window("load", "max_active_power", START + HOUR, 4)
        assert (registry.stats.reads, registry.stats.hits, registry.stats.misses) == (2, 1, 1)
        with pytest.raises(ValueError):
            first[0] = 5.0

    def test_lru_evicts_oldest(self):
        registry = self.registry()
        for issue in range(3):
            registry.forecast_window("load", "max_active_power", START + issue * HOUR, 2)
        registry.forecast_window("load", "max_active_power", START, 2)
        assert registry.stats.hits == 0

    def test_window_errors(self):
        registry = self.registry()
        with pytest.raises(ForecastNotFoundError):
            registry.forecast_window("wind", "max_active_power", START, 2)
        with pytest.raises(IssueTimeNotFoundError):
            registry.forecast_window("load", "max_active_power", START + 10 * HOUR, 2)
        with pytest.raises(HorizonOverrunError):
            registry.forecast_window("load", "max_active_power", START, 7)

    def test_realization_lookup(self):
        registry = self.registry()
        assert registry.realization("load", "max_active_power", START + 3 * HOUR) == 3.0
        with pytest.raises(OffGridError, match="off-grid timestamp"):
            registry.realization("load", "max_active_power", START + timedelta(minutes=30))
        with pytest.raises(OutOfRangeError):
            registry.realization("load", "max_active_power", START + 10 * HOUR)
        with pytest.raises(OutOfRangeError):
            registry.realization("load", "max_active_power", START - HOUR)
        with pytest.raises(RealizationNotFoundError):
            registry.realization("wind", "max_active_power", START)
        assert registry.stats.realization_reads == 5

    def test_realization_coverage(self):
        series = self.registry().get_realization_series("load", "max_active_power")
        assert series.end == START + 9 * HOUR
        assert series.covers(START, START + 10 * HOUR)
        assert not series.covers(START, START + 11 * HOUR)


def test_components_of_type(small_system):
    assert [g.name for g in small_system.components_of_type("ThermalGen")] == ["cheap", "peaker"]
    assert small_system.component_type("load") == "Load"
    with pytest.raises(KeyError):
        small_system.components_of_type("Transformer")
    with pytest.raises(KeyError):
        SystemModel(base_power=100.0).get_component("ghost")
