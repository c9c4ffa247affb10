"""Shared fixtures: small inline systems and the generated five-bus case."""

from datetime import datetime, timedelta

import numpy as np
import pytest

from src.system.cases import write_five_bus_case
from src.system.components import Bus, BusType, Line, Load, RenewableGen, ThermalGen
from src.system.system import SystemModel
from src.system.timeseries import Forecast, RealizationSeries

START = datetime(2024, 1, 1)
HOUR = timedelta(hours=1)


def hourly_forecast(component, values, issues=4, label="max_active_power", horizon=None):
    """Hourly forecast issued every hour, each window equal to ``values``."""
    values = np.asarray(values, dtype=float)
    steps = horizon or len(values)
    windows = {START + i * HOUR: values[:steps].copy() for i in range(issues)}
    return Forecast(component, label, HOUR, HOUR, steps, windows)


def hourly_realization(component, values, label="max_active_power"):
    return RealizationSeries(component, label, HOUR, START, np.asarray(values, dtype=float))


def two_unit_system(load_profile=(0.6, 0.9, 1.2, 0.8), with_wind=False, horizon=4):
    """Copper-plate system: one cheap and one expensive unit, one load.

    Everything is per-unit on a base of 100 MW.
    """
    sys = SystemModel(base_power=100.0, name="two_unit")
    sys.buses["b1"] = Bus("b1", 230.0, BusType.SLACK)
    sys.buses["b2"] = Bus("b2", 230.0, BusType.PQ)
    sys.lines["l12"] = Line("l12", "b1", "b2", 0.1, 5.0)
    sys.thermal_gens["cheap"] = ThermalGen(
        "cheap", "b1", p_min=0.2, p_max=1.0, ramp_up=1.0, ramp_down=1.0, min_up=1, min_down=1,
        variable_cost=10.0, initial_on=True, initial_power=0.5, initial_duration=4.0,
    )
    sys.thermal_gens["peaker"] = ThermalGen(
        "peaker", "b2", p_min=0.1, p_max=1.0, ramp_up=1.0, ramp_down=1.0, min_up=1, min_down=1,
        variable_cost=50.0, startup_cost=20.0, initial_on=False, initial_power=0.0, initial_duration=4.0,
    )
    sys.loads["load"] = Load("load", "b2", peak=1.0)
    sys.time_series.add_forecast(hourly_forecast("load", load_profile, horizon=horizon))
    sys.time_series.add_realization(hourly_realization("load", list(load_profile) * 2))
    if with_wind:
        sys.renewable_gens["wind"] = RenewableGen("wind", "b1", rating=0.5, curtailment_cost=1.0)
        sys.time_series.add_forecast(hourly_forecast("wind", [0.4] * len(load_profile), horizon=horizon))
        sys.time_series.add_realization(hourly_realization("wind", [0.4] * 2 * len(load_profile)))
    return sys


@pytest.fixture
def small_system():
    return two_unit_system()


@pytest.fixture
def five_bus_case(tmp_path):
    """One simulated day of the five-bus case."""
    return write_five_bus_case(tmp_path / "case", days=1)
