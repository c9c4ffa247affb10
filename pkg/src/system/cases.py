"""Generator for the five-bus test system and its simulation config.

The case follows the well-known PJM five-bus layout (five thermal units,
three loads) extended with one wind plant, one battery and an upward reserve
product. Time series are synthetic but deterministic for a given seed: hourly
forecasts issued every hour with 48-step windows, and hourly realizations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Union

import numpy as np
import pandas as pd

START = datetime(2024, 1, 1)
HORIZON_STEPS = 48

BUSES = [
    {"name": "bus1", "base_voltage": 230.0, "bus_type": "slack"},
    {"name": "bus2", "base_voltage": 230.0, "bus_type": "pq"},
    {"name": "bus3", "base_voltage": 230.0, "bus_type": "pv"},
    {"name": "bus4", "base_voltage": 230.0, "bus_type": "pv"},
    {"name": "bus5", "base_voltage": 230.0, "bus_type": "pv"},
]

LINES = [
    {"name": "line12", "from_bus": "bus1", "to_bus": "bus2", "reactance": 0.0281, "rating": 400.0},
    {"name": "line14", "from_bus": "bus1", "to_bus": "bus4", "reactance": 0.0304, "rating": 400.0},
    {"name": "line15", "from_bus": "bus1", "to_bus": "bus5", "reactance": 0.0064, "rating": 400.0},
    {"name": "line23", "from_bus": "bus2", "to_bus": "bus3", "reactance": 0.0108, "rating": 400.0},
    {"name": "line34", "from_bus": "bus3", "to_bus": "bus4", "reactance": 0.0297, "rating": 400.0},
    {"name": "line45", "from_bus": "bus4", "to_bus": "bus5", "reactance": 0.0297, "rating": 240.0},
]

THERMAL = [
    {
        "name": "Alta", "bus": "bus1", "p_min": 0.0, "p_max": 40.0,
        "ramp_up": 40.0, "ramp_down": 40.0, "min_up": 1, "min_down": 1,
        "variable_cost": 14.0, "no_load_cost": 0.0, "startup_cost": 100.0,
        "initial_on": False, "initial_power": 0.0, "initial_duration": 5.0,
    },
    {
        "name": "ParkCity", "bus": "bus1", "p_min": 20.0, "p_max": 170.0,
        "ramp_up": 170.0, "ramp_down": 170.0, "min_up": 2, "min_down": 2,
        "variable_cost": 15.0, "no_load_cost": 50.0, "startup_cost": 500.0,
        "initial_on": False, "initial_power": 0.0, "initial_duration": 5.0,
    },
    {
        "name": "Solitude", "bus": "bus3", "p_min": 100.0, "p_max": 520.0,
        "ramp_up": 520.0, "ramp_down": 520.0, "min_up": 4, "min_down": 4,
        "variable_cost": [[100.0, 2800.0], [300.0, 8800.0], [520.0, 16060.0]],
        "no_load_cost": 100.0, "startup_cost": 3000.0,
        "initial_on": True, "initial_power": 200.0, "initial_duration": 8.0,
    },
    {
        "name": "Sundance", "bus": "bus4", "p_min": 40.0, "p_max": 200.0,
        "ramp_up": 30.0, "ramp_down": 30.0, "min_up": 3, "min_down": 2,
        "variable_cost": 40.0, "no_load_cost": 20.0, "startup_cost": 1000.0,
        "initial_on": False, "initial_power": 0.0, "initial_duration": 5.0,
    },
    {
        "name": "Brighton", "bus": "bus5", "p_min": 120.0, "p_max": 600.0,
        "ramp_up": 600.0, "ramp_down": 600.0, "min_up": 6, "min_down": 6,
        "variable_cost": 10.0, "no_load_cost": 200.0, "startup_cost": 5000.0,
        "initial_on": True, "initial_power": 300.0, "initial_duration": 10.0,
    },
]

RENEWABLES = [{"name": "Wind", "bus": "bus5", "rating": 200.0, "curtailment_cost": 2.0}]

LOADS = [
    {"name": "LoadB", "bus": "bus2", "peak": 300.0},
    {"name": "LoadC", "bus": "bus3", "peak": 300.0},
    {"name": "LoadD", "bus": "bus4", "peak": 400.0},
]

STORAGE = [
    {
        "name": "Battery", "bus": "bus3", "energy_capacity": 100.0,
        "charge_max": 50.0, "discharge_max": 50.0,
        "charge_efficiency": 0.9, "discharge_efficiency": 0.9, "initial_soc": 50.0,
    }
]

RESERVES = [
    {
        "name": "SpinUp", "direction": "up",
        "contributing_devices": ["Solitude", "Brighton", "Battery"],
        "requirement_series": "requirement", "requirement": 50.0,
    }
]

TEMPLATES = {
    "unit_commitment": {
        "network": {"formulation": "CopperPlate", "use_slacks": False},
        "devices": {
            "ThermalGen": "ThermalStandardUnitCommitment",
            "RenewableGen": "RenewableFullDispatch",
            "Load": "StaticPowerLoad",
            "Storage": "StorageBasicDispatch",
        },
        "services": {"SpinUp": "RangeReserve"},
    },
    "economic_dispatch": {
        "network": {"formulation": "CopperPlate", "use_slacks": True},
        "devices": {
            "ThermalGen": "ThermalBasicDispatch",
            "RenewableGen": "RenewableFullDispatch",
            "Load": "StaticPowerLoad",
            "Storage": "StorageBasicDispatch",
        },
        "services": {},
    },
}


@dataclass(frozen=True)
class FiveBusCase:
    """Paths of a generated case."""

    directory: Path
    descriptor: Path
    config: Path


def _load_shape(stamps: pd.DatetimeIndex, phase: float) -> np.ndarray:
    hour = stamps.hour.to_numpy() + stamps.minute.to_numpy() / 60.0
    return 0.7 + 0.2 * np.sin(2 * np.pi * (hour - 8.0 + phase) / 24.0)


def _wind_shape(stamps: pd.DatetimeIndex) -> np.ndarray:
    hour = stamps.hour.to_numpy() + stamps.minute.to_numpy() / 60.0
    day = (stamps - pd.Timestamp(START)).days.to_numpy()
    return np.clip(0.4 + 0.3 * np.sin(2 * np.pi * hour / 24.0 + 1.0 + 0.5 * day), 0.0, 1.0)


def _truth(stamps: pd.DatetimeIndex) -> dict[str, np.ndarray]:
    return {
        "LoadB": _load_shape(stamps, 0.0),
        "LoadC": _load_shape(stamps, 0.5),
        "LoadD": _load_shape(stamps, -0.5),
        "Wind": _wind_shape(stamps),
    }


def _write_forecasts(
    path: Path, issue_times: pd.DatetimeIndex, error: float, rng: np.random.Generator
) -> None:
    lead = np.arange(HORIZON_STEPS) / HORIZON_STEPS
    frames = []
    for issue in issue_times:
        stamps = pd.date_range(issue, periods=HORIZON_STEPS, freq="h")
        frame = pd.DataFrame({"issue_time": issue, "timestamp": stamps})
        for name, values in _truth(stamps).items():
            noise = error * lead * rng.standard_normal(HORIZON_STEPS)
            upper = 1.0 if name == "Wind" else 2.0
            frame[name] = np.clip(values * (1.0 + noise), 0.0, upper).round(6)
        frames.append(frame)
    pd.concat(frames, ignore_index=True).to_csv(path, index=False)


def _write_realizations(
    path: Path, stamps: pd.DatetimeIndex, noise: float, rng: np.random.Generator
) -> None:
    frame = pd.DataFrame({"timestamp": stamps})
    for name, values in _truth(stamps).items():
        upper = 1.0 if name == "Wind" else 2.0
        perturbed = values * (1.0 + noise * rng.standard_normal(len(stamps)))
        frame[name] = np.clip(perturbed, 0.0, upper).round(6)
    frame.to_csv(path, index=False)


def _write_requirement(path: Path, issue_times: pd.DatetimeIndex, forecast: bool) -> None:
    if forecast:
        rows = [
            {"issue_time": issue, "timestamp": stamp, "SpinUp": 1.0}
            for issue in issue_times
            for stamp in pd.date_range(issue, periods=HORIZON_STEPS, freq="h")
        ]
    else:
        rows = [{"timestamp": stamp, "SpinUp": 1.0} for stamp in issue_times]
    pd.DataFrame(rows).to_csv(path, index=False)


def five_bus_descriptor(include_initial_conditions: bool = True) -> dict[str, Any]:
    """Return the descriptor document (without the time-series manifest)."""
    thermal = [dict(g) for g in THERMAL]
    storage = [dict(s) for s in STORAGE]
    if not include_initial_conditions:
        for gen in thermal:
            for key in ("initial_on", "initial_power", "initial_duration"):
                gen.pop(key)
        for unit in storage:
            unit.pop("initial_soc")
    return {
        "name": "five_bus",
        "base_power": 100.0,
        "buses": BUSES,
        "lines": LINES,
        "thermal_generators": thermal,
        "renewable_generators": RENEWABLES,
        "loads": LOADS,
        "storage": storage,
        "reserves": RESERVES,
    }


def five_bus_config(
    days: int = 3,
    *,
    ed_horizon: int = 2,
    chronology: str = "InterProblemChronology",
    energy_target: bool = False,
    uc_mip_gap: float = 1e-2,
    output_dir: str = "output",
) -> dict[str, Any]:
    """Return the UC -> ED -> emulator simulation config for ``days`` days."""
    feedforwards = [
        {
            "kind": "SemiContinuous",
            "source": "UC",
            "source_variable": "OnStatus",
            "target": "ED",
            "target_variable": "ActivePower",
            "components": "ThermalGen",
        },
        {
            "kind": "SemiContinuous",
            "source": "UC",
            "source_variable": "OnStatus",
            "target": "Emulator",
            "target_variable": "ActivePower",
            "components": "ThermalGen",
        },
    ]
    if energy_target:
        feedforwards.append(
            {
                "kind": "EnergyTarget",
                "source": "UC",
                "source_variable": "SoC",
                "target": "ED",
                "target_variable": "SoC",
                "components": "Storage",
                "penalty": 1e4,
            }
        )
    return {
        "system": "system.json",
        "templates": TEMPLATES,
        "models": [
            {
                "name": "UC",
                "template": "unit_commitment",
                "horizon": HORIZON_STEPS,
                "resolution": "1h",
                "interval": "24h",
                "solver": {"engine": "bundled", "mip_gap": uc_mip_gap},
            },
            {
                "name": "ED",
                "template": "economic_dispatch",
                "horizon": ed_horizon,
                "resolution": "1h",
                "interval": "1h",
            },
        ],
        "emulator": {"name": "Emulator", "template": "economic_dispatch", "resolution": "1h"},
        "feedforwards": feedforwards,
        "chronology": chronology,
        "span": {"start": START.isoformat(), "steps": days},
        "store": {"backend": "file"},
        "output_dir": output_dir,
        "on_infeasible": "halt",
    }


def write_five_bus_case(
    directory: Union[str, Path],
    days: int = 3,
    *,
    forecast_error: float = 0.02,
    realization_noise: float = 0.01,
    include_initial_conditions: bool = True,
    seed: int = 7,
    **config_options: Any,
) -> FiveBusCase:
    """Write the descriptor, time-series CSVs and simulation config.

    Args:
        directory: Target directory, created if needed.
        days: Simulated days; forecasts cover every hourly issue time of the
            span, realizations every hour of it.
        forecast_error: Relative forecast error at the end of each window.
        realization_noise: Relative deviation of actuals from the underlying
            profile. With both errors 0, actuals equal every forecast.
        include_initial_conditions: Drop the thermal and storage initial
            state from the descriptor when False.
        seed: Seed of the noise generator.
        **config_options: Forwarded to ``five_bus_config``.

    Returns:
        The written case paths.
    """
    directory = Path(directory)
    series_dir = directory / "timeseries"
    series_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    issue_times = pd.date_range(START, periods=days * 24, freq="h")
    _write_forecasts(series_dir / "forecasts.csv", issue_times, forecast_error, rng)
    _write_realizations(series_dir / "actuals.csv", issue_times, realization_noise, rng)
    _write_requirement(series_dir / "requirement_forecasts.csv", issue_times, True)
    _write_requirement(series_dir / "requirement_actuals.csv", issue_times, False)

    descriptor = five_bus_descriptor(include_initial_conditions)
    forecast_entry = {"resolution": "1h", "issue_interval": "1h", "horizon_steps": HORIZON_STEPS}
    descriptor["time_series"] = [
        {"type": "forecast", "label": "max_active_power",
         "path": "timeseries/forecasts.csv", **forecast_entry},
        {"type": "realization", "label": "max_active_power",
         "path": "timeseries/actuals.csv", "resolution": "1h"},
        {"type": "forecast", "label": "requirement",
         "path": "timeseries/requirement_forecasts.csv", **forecast_entry},
        {"type": "realization", "label": "requirement",
         "path": "timeseries/requirement_actuals.csv", "resolution": "1h"},
    ]
    descriptor_path = directory / "system.json"
    descriptor_path.write_text(json.dumps(descriptor, indent=2), encoding="utf-8")

    config_path = directory / "simulation.json"
    config_path.write_text(
        json.dumps(five_bus_config(days, **config_options), indent=2), encoding="utf-8"
    )
    return FiveBusCase(directory=directory, descriptor=descriptor_path, config=config_path)
