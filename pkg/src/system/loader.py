"""System descriptor loader.

Reads the JSON system descriptor, validates every component and reference,
converts power quantities to per-unit on ``base_power`` and ingests the
forecast/realization CSV files listed in its ``time_series`` manifest.

Descriptor layout (all power values in MW, energy in MWh, durations in h)::

    {
      "name": "five_bus", "base_power": 100.0,
      "buses": [{"name", "base_voltage", "bus_type"}],
      "lines": [{"name", "from_bus", "to_bus", "reactance", "rating"}],
      "thermal_generators": [{"name", "bus", "p_min", "p_max", "ramp_up",
          "ramp_down", "min_up", "min_down", "variable_cost", "no_load_cost",
          "startup_cost", "initial_on"?, "initial_power"?, "initial_duration"?}],
      "renewable_generators": [{"name", "bus", "rating", "curtailment_cost"}],
      "loads": [{"name", "bus", "peak"}],
      "storage": [{"name", "bus", "energy_capacity", "charge_max",
          "discharge_max", "charge_efficiency", "discharge_efficiency",
          "initial_soc"?}],
      "reserves": [{"name", "direction", "contributing_devices",
          "requirement_series", "requirement"}],
      "time_series": [{"type": "forecast"|"realization", "label", "path",
          "resolution", "issue_interval"?, "horizon_steps"?}]
    }

``variable_cost`` is either a number ($/MWh) or a convex piecewise linear
curve given as ``[[MW, $/h], ...]``. Forecast CSVs have the columns
``issue_time, timestamp, <component>...``; realization CSVs have
``timestamp, <component>...``. Time-series values are normalized (per-unit of
the device rating, peak or reserve requirement).
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Any, Union

import numpy as np
import pandas as pd

from src.config.documents import load_document, parse_duration
from src.config.schema import SchemaError

from .components import (
    Bus,
    BusType,
    Line,
    Load,
    RenewableGen,
    ReserveProduct,
    Storage,
    ThermalGen,
)
from .errors import SystemValidationError
from .system import SystemModel
from .timeseries import Forecast, RealizationSeries, TimeSeriesEntry
from .units import to_per_unit

logger = logging.getLogger(__name__)

_SECTIONS = (
    "buses",
    "lines",
    "thermal_generators",
    "renewable_generators",
    "loads",
    "storage",
    "reserves",
    "time_series",
)


def _number(
    obj: dict[str, Any],
    key: str,
    where: str,
    *,
    default: float | None = None,
    minimum: float | None = None,
    positive: bool = False,
) -> float:
    value = obj.get(key, default)
    if value is None or isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SystemValidationError(f"{where}.{key} must be a number")
    if not math.isfinite(value):
        raise SystemValidationError(f"{where}.{key} must be finite")
    if positive and value <= 0:
        raise SystemValidationError(f"{where}.{key} must be > 0, got {value}")
    if minimum is not None and value < minimum:
        raise SystemValidationError(f"{where}.{key} must be >= {minimum}, got {value}")
    return float(value)


def _optional_number(obj: dict[str, Any], key: str, where: str) -> float | None:
    if obj.get(key) is None:
        return None
    return _number(obj, key, where)


def _name(obj: dict[str, Any], where: str) -> str:
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise SystemValidationError(f"{where}.name must be a non-empty string")
    return name


def _section(data: dict[str, Any], key: str) -> list[dict[str, Any]]:
    items = data.get(key, [])
    if not isinstance(items, list):
        raise SystemValidationError(f"'{key}' must be a list")
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise SystemValidationError(f"{key}[{i}] must be a mapping/object")
    return items


class _NameRegistry:
    """Tracks component names; names are unique across every section."""

    def __init__(self):
        self._owners: dict[str, str] = {}

    def claim(self, name: str, where: str) -> None:
        if name in self._owners:
            raise SystemValidationError(
                f"duplicate name '{name}' at {where} (already used by {self._owners[name]})"
            )
        self._owners[name] = where


def _bus_ref(obj: dict[str, Any], key: str, where: str, buses: dict[str, Bus]) -> str:
    ref = obj.get(key)
    if ref not in buses:
        raise SystemValidationError(
            f"{where}.{key} references unknown bus {ref!r}"
        )
    return ref


def _parse_buses(items, names: _NameRegistry) -> dict[str, Bus]:
    buses: dict[str, Bus] = {}
    for i, item in enumerate(items):
        where = f"buses[{i}]"
        name = _name(item, where)
        names.claim(name, where)
        try:
            bus_type = BusType(str(item.get("bus_type", "pq")).lower())
        except ValueError:
            raise SystemValidationError(
                f"{where}.bus_type must be one of {[t.value for t in BusType]}"
            ) from None
        buses[name] = Bus(
            name=name,
            base_voltage=_number(item, "base_voltage", where, default=0.0, minimum=0.0),
            bus_type=bus_type,
        )
    slack = [b.name for b in buses.values() if b.bus_type is BusType.SLACK]
    if len(slack) != 1:
        raise SystemValidationError(
            f"exactly one slack bus required, found {len(slack)}: {slack}"
        )
    return buses


def _parse_lines(items, names, buses, base) -> dict[str, Line]:
    lines: dict[str, Line] = {}
    for i, item in enumerate(items):
        where = f"lines[{i}]"
        name = _name(item, where)
        names.claim(name, where)
        from_bus = _bus_ref(item, "from_bus", where, buses)
        to_bus = _bus_ref(item, "to_bus", where, buses)
        if from_bus == to_bus:
            raise SystemValidationError(
                f"self-loop line '{name}': from_bus and to_bus are both '{from_bus}'"
            )
        lines[name] = Line(
            name=name,
            from_bus=from_bus,
            to_bus=to_bus,
            reactance=_number(item, "reactance", where, positive=True),
            rating=to_per_unit(_number(item, "rating", where, positive=True), base),
        )
    return lines


def _parse_cost_curve(value: Any, where: str) -> tuple[tuple[float, float], ...]:
    if not isinstance(value, list) or len(value) < 2:
        raise SystemValidationError(
            f"{where}.variable_cost curve needs at least two [MW, $/h] points"
        )
    points: list[tuple[float, float]] = []
    for j, point in enumerate(value):
        if (
            not isinstance(point, (list, tuple))
            or len(point) != 2
            or not all(isinstance(v, (int, float)) and math.isfinite(v) for v in point)
        ):
            raise SystemValidationError(
                f"{where}.variable_cost[{j}] must be a finite [MW, $/h] pair"
            )
        points.append((float(point[0]), float(point[1])))
    mw = np.array([p[0] for p in points])
    cost = np.array([p[1] for p in points])
    if np.any(np.diff(mw) <= 0):
        raise SystemValidationError(
            f"{where}.variable_cost breakpoints must be strictly increasing in MW"
        )
    slopes = np.diff(cost) / np.diff(mw)
    if np.any(slopes < 0):
        raise SystemValidationError(f"{where}.variable_cost slopes must be >= 0")
    if np.any(np.diff(slopes) < -1e-9):
        raise SystemValidationError(
            f"{where}.variable_cost curve must be convex (nondecreasing slopes)"
        )
    return tuple(points)


def _parse_thermal(items, names, buses, base) -> dict[str, ThermalGen]:
    gens: dict[str, ThermalGen] = {}
    for i, item in enumerate(items):
        where = f"thermal_generators[{i}]"
        name = _name(item, where)
        names.claim(name, where)
        bus = _bus_ref(item, "bus", where, buses)
        p_min = _number(item, "p_min", where, minimum=0.0)
        p_max = _number(item, "p_max", where, positive=True)
        if p_min > p_max:
            raise SystemValidationError(
                f"{where}: p_min {p_min} exceeds p_max {p_max} for '{name}'"
            )
        for key in ("min_up", "min_down"):
            value = item.get(key, 0)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise SystemValidationError(f"{where}.{key} must be an integer >= 0")

        raw_cost = item.get("variable_cost", 0.0)
        cost_curve: tuple[tuple[float, float], ...] = ()
        variable_cost = 0.0
        if isinstance(raw_cost, list):
            cost_curve = _parse_cost_curve(raw_cost, where)
            if cost_curve[0][0] > p_min + 1e-9 or cost_curve[-1][0] < p_max - 1e-9:
                raise SystemValidationError(
                    f"{where}.variable_cost curve must span [p_min, p_max]"
                )
        else:
            variable_cost = _number(item, "variable_cost", where, minimum=0.0)

        initial_on = item.get("initial_on")
        if initial_on is not None and not isinstance(initial_on, bool):
            raise SystemValidationError(f"{where}.initial_on must be a boolean")
        initial_power = _optional_number(item, "initial_power", where)
        initial_duration = _optional_number(item, "initial_duration", where)
        if initial_on is not None and initial_power is not None:
            if initial_on and not (p_min - 1e-9 <= initial_power <= p_max + 1e-9):
                raise SystemValidationError(
                    f"{where}.initial_power {initial_power} outside "
                    f"[p_min, p_max] for committed unit '{name}'"
                )
            if not initial_on and initial_power != 0:
                raise SystemValidationError(
                    f"{where}.initial_power must be 0 when '{name}' starts off"
                )
        if initial_duration is not None and initial_duration < 1:
            raise SystemValidationError(f"{where}.initial_duration must be >= 1 h")

        gens[name] = ThermalGen(
            name=name,
            bus=bus,
            p_min=to_per_unit(p_min, base),
            p_max=to_per_unit(p_max, base),
            ramp_up=to_per_unit(_number(item, "ramp_up", where, positive=True), base),
            ramp_down=to_per_unit(_number(item, "ramp_down", where, positive=True), base),
            min_up=item.get("min_up", 0),
            min_down=item.get("min_down", 0),
            variable_cost=variable_cost,
            cost_curve=cost_curve,
            no_load_cost=_number(item, "no_load_cost", where, default=0.0, minimum=0.0),
            startup_cost=_number(item, "startup_cost", where, default=0.0, minimum=0.0),
            initial_on=initial_on,
            initial_power=None if initial_power is None else to_per_unit(initial_power, base),
            initial_duration=initial_duration,
            available=bool(item.get("available", True)),
        )
    return gens


def _parse_renewables(items, names, buses, base) -> dict[str, RenewableGen]:
    gens: dict[str, RenewableGen] = {}
    for i, item in enumerate(items):
        where = f"renewable_generators[{i}]"
        name = _name(item, where)
        names.claim(name, where)
        gens[name] = RenewableGen(
            name=name,
            bus=_bus_ref(item, "bus", where, buses),
            rating=to_per_unit(_number(item, "rating", where, positive=True), base),
            curtailment_cost=_number(
                item, "curtailment_cost", where, default=0.0, minimum=0.0
            ),
            available=bool(item.get("available", True)),
        )
    return gens


def _parse_loads(items, names, buses, base) -> dict[str, Load]:
    loads: dict[str, Load] = {}
    for i, item in enumerate(items):
        where = f"loads[{i}]"
        name = _name(item, where)
        names.claim(name, where)
        loads[name] = Load(
            name=name,
            bus=_bus_ref(item, "bus", where, buses),
            peak=to_per_unit(_number(item, "peak", where, positive=True), base),
            available=bool(item.get("available", True)),
        )
    return loads


def _parse_storage(items, names, buses, base) -> dict[str, Storage]:
    units: dict[str, Storage] = {}
    for i, item in enumerate(items):
        where = f"storage[{i}]"
        name = _name(item, where)
        names.claim(name, where)
        capacity = _number(item, "energy_capacity", where, positive=True)
        efficiencies = []
        for key in ("charge_efficiency", "discharge_efficiency"):
            eff = _number(item, key, where, default=1.0)
            if not 0 < eff <= 1:
                raise SystemValidationError(f"{where}.{key} must lie in (0, 1]")
            efficiencies.append(eff)
        initial_soc = _optional_number(item, "initial_soc", where)
        if initial_soc is not None and not 0 <= initial_soc <= capacity:
            raise SystemValidationError(
                f"{where}.initial_soc {initial_soc} outside [0, energy_capacity]"
            )
        units[name] = Storage(
            name=name,
            bus=_bus_ref(item, "bus", where, buses),
            energy_capacity=to_per_unit(capacity, base),
            charge_max=to_per_unit(_number(item, "charge_max", where, positive=True), base),
            discharge_max=to_per_unit(
                _number(item, "discharge_max", where, positive=True), base
            ),
            charge_efficiency=efficiencies[0],
            discharge_efficiency=efficiencies[1],
            initial_soc=None if initial_soc is None else to_per_unit(initial_soc, base),
            available=bool(item.get("available", True)),
        )
    return units


def _parse_reserves(items, names, thermal, storage, base) -> dict[str, ReserveProduct]:
    reserves: dict[str, ReserveProduct] = {}
    for i, item in enumerate(items):
        where = f"reserves[{i}]"
        name = _name(item, where)
        names.claim(name, where)
        direction = item.get("direction", "up")
        if direction != "up":
            raise SystemValidationError(f"{where}.direction must be 'up'")
        devices = item.get("contributing_devices")
        if not isinstance(devices, list) or not devices:
            raise SystemValidationError(
                f"{where}.contributing_devices must be a non-empty list"
            )
        for device in devices:
            if device not in thermal and device not in storage:
                raise SystemValidationError(
                    f"{where}.contributing_devices references unknown thermal or "
                    f"storage device {device!r}"
                )
        series = item.get("requirement_series")
        if not isinstance(series, str) or not series:
            raise SystemValidationError(f"{where}.requirement_series must be a label")
        reserves[name] = ReserveProduct(
            name=name,
            direction=direction,
            contributing_devices=tuple(devices),
            requirement_series=series,
            requirement=to_per_unit(
                _number(item, "requirement", where, minimum=0.0), base
            ),
            available=bool(item.get("available", True)),
        )
    return reserves


def _parse_entry(item: dict[str, Any], where: str, root: Path) -> TimeSeriesEntry:
    kind = item.get("type")
    if kind not in ("forecast", "realization"):
        raise SystemValidationError(f"{where}.type must be 'forecast' or 'realization'")
    label = item.get("label")
    if not isinstance(label, str) or not label:
        raise SystemValidationError(f"{where}.label must be a non-empty string")
    path = item.get("path")
    if not isinstance(path, str) or not path:
        raise SystemValidationError(f"{where}.path must be a file path")
    try:
        resolution = parse_duration(item.get("resolution"), f"{where}.resolution")
        issue_interval = None
        horizon_steps = None
        if kind == "forecast":
            issue_interval = parse_duration(
                item.get("issue_interval"), f"{where}.issue_interval"
            )
            horizon_steps = item.get("horizon_steps")
            if not isinstance(horizon_steps, int) or horizon_steps <= 0:
                raise SystemValidationError(
                    f"{where}.horizon_steps must be a positive integer"
                )
    except SchemaError as exc:
        raise SystemValidationError(str(exc)) from exc
    return TimeSeriesEntry(
        kind=kind,
        label=label,
        path=str((root / path).resolve()),
        resolution=resolution.to_pytimedelta(),
        issue_interval=None if issue_interval is None else issue_interval.to_pytimedelta(),
        horizon_steps=horizon_steps,
    )


def _value_columns(frame: pd.DataFrame, time_columns: tuple[str, ...], where: str):
    for col in time_columns:
        if col not in frame.columns:
            raise SystemValidationError(f"{where}: CSV is missing column '{col}'")
    columns = [c for c in frame.columns if c not in time_columns]
    if not columns:
        raise SystemValidationError(f"{where}: CSV has no component columns")
    values = frame[columns].to_numpy(dtype=float)
    if not np.all(np.isfinite(values)):
        raise SystemValidationError(f"{where}: CSV contains non-finite values")
    return columns


def _read_forecasts(entry: TimeSeriesEntry, where: str) -> list[Forecast]:
    frame = pd.read_csv(entry.path, parse_dates=["issue_time", "timestamp"])
    columns = _value_columns(frame, ("issue_time", "timestamp"), where)
    resolution = pd.Timedelta(entry.resolution)
    offsets = np.arange(entry.horizon_steps) * resolution.to_timedelta64()

    windows: dict[str, dict] = {c: {} for c in columns}
    issue_times = []
    for issue_time, group in frame.groupby("issue_time", sort=True):
        group = group.sort_values("timestamp")
        stamp = issue_time.isoformat()
        if len(group) != entry.horizon_steps:
            raise SystemValidationError(
                f"{where}: window issued at {stamp} has {len(group)} values, "
                f"expected {entry.horizon_steps}"
            )
        steps = (group["timestamp"] - issue_time).to_numpy()
        if not np.array_equal(steps, offsets):
            raise SystemValidationError(
                f"{where}: window issued at {stamp} is not on a "
                f"{resolution} grid starting at its issue time"
            )
        issue_times.append(issue_time)
        for column in columns:
            values = group[column].to_numpy(dtype=float)
            values.setflags(write=False)
            windows[column][issue_time.to_pydatetime()] = values

    gaps = pd.Series(issue_times).diff().dropna()
    if (gaps != pd.Timedelta(entry.issue_interval)).any():
        raise SystemValidationError(
            f"{where}: issue times are not equally spaced by {entry.issue_interval}"
        )
    return [
        Forecast(
            component=column,
            label=entry.label,
            resolution=entry.resolution,
            issue_interval=entry.issue_interval,
            horizon_steps=entry.horizon_steps,
            windows=windows[column],
        )
        for column in columns
    ]


def _read_realizations(entry: TimeSeriesEntry, where: str) -> list[RealizationSeries]:
    frame = pd.read_csv(entry.path, parse_dates=["timestamp"]).sort_values("timestamp")
    columns = _value_columns(frame, ("timestamp",), where)
    stamps = frame["timestamp"]
    if len(stamps) == 0:
        raise SystemValidationError(f"{where}: realization CSV is empty")
    gaps = stamps.diff().dropna()
    if (gaps != pd.Timedelta(entry.resolution)).any():
        raise SystemValidationError(
            f"{where}: timestamps are not equally spaced by {entry.resolution}"
        )
    start = stamps.iloc[0].to_pydatetime()
    series = []
    for column in columns:
        values = frame[column].to_numpy(dtype=float)
        values.setflags(write=False)
        series.append(
            RealizationSeries(
                component=column,
                label=entry.label,
                resolution=entry.resolution,
                start=start,
                values=values,
            )
        )
    return series


def load_system(descriptor_path: Union[str, Path]) -> SystemModel:
    """Load and validate a system descriptor.

    Args:
        descriptor_path: Path to the JSON descriptor. Time-series paths inside
            it resolve against the descriptor's directory.

    Returns:
        A validated SystemModel with power quantities in per-unit.

    Raises:
        FileNotFoundError: If the descriptor or a time-series file is missing.
        SystemValidationError: On schema violations, duplicate names, dangling
            references or component invariant violations.
    """
    path = Path(descriptor_path)
    try:
        data = load_document(path)
    except SchemaError as exc:
        raise SystemValidationError(str(exc)) from exc

    base = _number(data, "base_power", "descriptor", positive=True)
    unknown = set(data) - set(_SECTIONS) - {"name", "base_power"}
    if unknown:
        raise SystemValidationError(f"descriptor has unknown sections {sorted(unknown)}")

    names = _NameRegistry()
    buses = _parse_buses(_section(data, "buses"), names)
    system = SystemModel(
        base_power=base,
        name=str(data.get("name", path.stem)),
        buses=buses,
        lines=_parse_lines(_section(data, "lines"), names, buses, base),
        thermal_gens=_parse_thermal(_section(data, "thermal_generators"), names, buses, base),
        renewable_gens=_parse_renewables(
            _section(data, "renewable_generators"), names, buses, base
        ),
        loads=_parse_loads(_section(data, "loads"), names, buses, base),
        storage=_parse_storage(_section(data, "storage"), names, buses, base),
    )
    system.reserves = _parse_reserves(
        _section(data, "reserves"), names, system.thermal_gens, system.storage, base
    )

    for i, item in enumerate(_section(data, "time_series")):
        where = f"time_series[{i}]"
        entry = _parse_entry(item, where, path.parent)
        if not Path(entry.path).is_file():
            raise FileNotFoundError(f"missing file: {entry.path} ({where})")
        if entry.kind == "forecast":
            loaded = _read_forecasts(entry, where)
            register = system.time_series.add_forecast
        else:
            loaded = _read_realizations(entry, where)
            register = system.time_series.add_realization
        for item_series in loaded:
            try:
                system.get_component(item_series.component)
            except KeyError:
                raise SystemValidationError(
                    f"{where}: column '{item_series.component}' does not name a component"
                ) from None
            register(item_series)

    for reserve in system.reserves.values():
        if not system.time_series.has_forecast(reserve.name, reserve.requirement_series):
            raise SystemValidationError(
                f"reserve '{reserve.name}' has no '{reserve.requirement_series}' "
                "requirement series attached"
            )

    logger.info(
        "Loaded system '%s': %d buses, %d lines, %d thermal, %d renewable, "
        "%d loads, %d storage, %d reserves",
        system.name,
        len(system.buses),
        len(system.lines),
        len(system.thermal_gens),
        len(system.renewable_gens),
        len(system.loads),
        len(system.storage),
        len(system.reserves),
    )
    return system
