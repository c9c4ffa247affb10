"""
System Module

Static power system data model, time-series registry and descriptor loader.
"""

from src.system.components import (
    Bus,
    BusType,
    InitialConditions,
    Line,
    Load,
    RenewableGen,
    ReserveProduct,
    Storage,
    ThermalGen,
)
from src.system.loader import load_system
from src.system.system import SystemModel, get_forecast_window, get_realization
from src.system.timeseries import Forecast, RealizationSeries, TimeSeriesRegistry

__all__ = [
    "Bus",
    "BusType",
    "Forecast",
    "InitialConditions",
    "Line",
    "Load",
    "RealizationSeries",
    "RenewableGen",
    "ReserveProduct",
    "Storage",
    "SystemModel",
    "ThermalGen",
    "TimeSeriesRegistry",
    "get_forecast_window",
    "get_realization",
    "load_system",
]
