"""Schema validation for simulation config documents.

Checks the structure of the config JSON before anything is built: required
sections, model and template references, durations, feedforward wiring and
store options. Semantic timing checks (divisibility, coverage) happen later in
``src.sequence.validation`` once the system is loaded.
"""

from __future__ import annotations

from typing import Any, TypeVar

from src.errors import OpsimError


class SchemaError(OpsimError, ValueError):
    """Raised when a config or descriptor document is structurally invalid."""


T = TypeVar("T")

NETWORK_FORMULATIONS = ("CopperPlate", "PTDFDCPower")
DEVICE_FORMULATIONS = {
    "ThermalGen": ("ThermalStandardUnitCommitment", "ThermalBasicDispatch"),
    "RenewableGen": ("RenewableFullDispatch",),
    "Load": ("StaticPowerLoad",),
    "Storage": ("StorageBasicDispatch",),
}
SERVICE_FORMULATIONS = ("RangeReserve",)
FEEDFORWARD_KINDS = ("SemiContinuous", "UpperBound", "LowerBound", "EnergyTarget")
CHRONOLOGIES = ("InterProblemChronology", "IntraProblemChronology")
INFEASIBILITY_POLICIES = ("halt", "skip_and_carry")
STORE_BACKENDS = ("memory", "file")
SOLVER_ENGINES = ("bundled", "highs")
MIN_WRITE_BATCH = 4 * 1024


def _as_list(x: T | list[T] | None) -> list[T]:
    """Return a list form of the input.

    - None -> []
    - list[T] -> same list
    - T -> [T]
    """
    if x is None:
        return []
    if isinstance(x, list):
        return x
    return [x]


def _require_mapping(value: Any, where: str) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise SchemaError(f"{where} must be a mapping/object")
    return value


def _require_keys(obj: dict[str, Any], keys: tuple[str, ...], where: str) -> None:
    for key in keys:
        if key not in obj:
            raise SchemaError(f"{where}.{key} is required")


def _validate_template(template: Any, where: str) -> None:
    template = _require_mapping(template, where)
    network = template.get("network", {"formulation": "CopperPlate"})
    if isinstance(network, str):
        network = {"formulation": network}
    network = _require_mapping(network, f"{where}.network")
    formulation = network.get("formulation")
    if formulation not in NETWORK_FORMULATIONS:
        raise SchemaError(
            f"{where}.network.formulation must be one of {list(NETWORK_FORMULATIONS)}, "
            f"got {formulation!r}"
        )
    if not isinstance(network.get("use_slacks", False), bool):
        raise SchemaError(f"{where}.network.use_slacks must be a boolean")

    devices = _require_mapping(template.get("devices", {}), f"{where}.devices")
    for device_type, name in devices.items():
        allowed = DEVICE_FORMULATIONS.get(device_type)
        if allowed is None:
            raise SchemaError(
                f"{where}.devices has unknown component type '{device_type}'"
            )
        if name not in allowed:
            raise SchemaError(
                f"{where}.devices.{device_type} must be one of {list(allowed)}, "
                f"got {name!r}"
            )

    services = _require_mapping(template.get("services", {}), f"{where}.services")
    for reserve, name in services.items():
        if name not in SERVICE_FORMULATIONS:
            raise SchemaError(
                f"{where}.services.{reserve} must be one of "
                f"{list(SERVICE_FORMULATIONS)}, got {name!r}"
            )


def _validate_solver(solver: Any, where: str) -> None:
    solver = _require_mapping(solver, where)
    engine = solver.get("engine", "bundled")
    if engine not in SOLVER_ENGINES:
        raise SchemaError(f"{where}.engine must be one of {list(SOLVER_ENGINES)}")
    for key in ("max_iterations", "node_limit"):
        value = solver.get(key)
        if value is not None and (not isinstance(value, int) or value <= 0):
            raise SchemaError(f"{where}.{key} must be a positive integer")
    gap = solver.get("mip_gap")
    if gap is not None and (not isinstance(gap, (int, float)) or gap < 0):
        raise SchemaError(f"{where}.mip_gap must be a non-negative number")


def _validate_template_ref(
    ref: Any, template_names: set[str], where: str
) -> None:
    if isinstance(ref, str):
        if ref not in template_names:
            raise SchemaError(f"{where} references unknown template '{ref}'")
    else:
        _validate_template(ref, where)


def validate_config_schema(data: dict[str, Any]) -> None:
    """Validate the structure of a simulation config document.

    Checks:
    - system: path of the system descriptor
    - templates: optional named templates; models may also inline theirs
    - models: non-empty list of decision models with unique names
    - emulator: optional single-step model
    - feedforwards: optional list wired between declared models
    - span, store, chronology, on_infeasible

    Raises:
        SchemaError: on structural issues; the message contains human-friendly details.
    """
    if not isinstance(data, dict):
        raise SchemaError("Top-level config must be a mapping/object")

    if not isinstance(data.get("system"), str) or not data["system"]:
        raise SchemaError("'system' must be the path of the system descriptor")

    templates = _require_mapping(data.get("templates", {}), "templates")
    for name, template in templates.items():
        _validate_template(template, f"templates.{name}")
    template_names = set(templates)

    models = data.get("models")
    if not isinstance(models, list) or not models:
        raise SchemaError("'models' must be a non-empty list of decision models")
    model_names: set[str] = set()
    for i, model in enumerate(models):
        where = f"models[{i}]"
        model = _require_mapping(model, where)
        _require_keys(model, ("name", "template", "horizon", "resolution", "interval"), where)
        if model["name"] in model_names:
            raise SchemaError(f"{where}.name duplicates model '{model['name']}'")
        model_names.add(model["name"])
        _validate_template_ref(model["template"], template_names, f"{where}.template")
        if not isinstance(model["horizon"], int) or model["horizon"] <= 0:
            raise SchemaError(f"{where}.horizon must be a positive number of steps")
        chronology = model.get("chronology")
        if chronology is not None and chronology not in CHRONOLOGIES:
            raise SchemaError(f"{where}.chronology must be one of {list(CHRONOLOGIES)}")
        if "solver" in model:
            _validate_solver(model["solver"], f"{where}.solver")

    emulator = data.get("emulator")
    if emulator is not None:
        emulator = _require_mapping(emulator, "emulator")
        _require_keys(emulator, ("name", "template", "resolution"), "emulator")
        if emulator["name"] in model_names:
            raise SchemaError(f"emulator.name duplicates model '{emulator['name']}'")
        _validate_template_ref(emulator["template"], template_names, "emulator.template")
        if "solver" in emulator:
            _validate_solver(emulator["solver"], "emulator.solver")
        model_names.add(emulator["name"])

    for i, ff in enumerate(_as_list(data.get("feedforwards"))):
        where = f"feedforwards[{i}]"
        ff = _require_mapping(ff, where)
        _require_keys(ff, ("kind", "source", "target", "components"), where)
        if ff["kind"] not in FEEDFORWARD_KINDS:
            raise SchemaError(f"{where}.kind must be one of {list(FEEDFORWARD_KINDS)}")
        for side in ("source", "target"):
            if ff[side] not in model_names:
                raise SchemaError(f"{where}.{side} references unknown model '{ff[side]}'")
        components = ff["components"]
        if not isinstance(components, (str, list)) or not components:
            raise SchemaError(
                f"{where}.components must be a component type name or a list of names"
            )
        penalty = ff.get("penalty")
        if penalty is not None and (not isinstance(penalty, (int, float)) or penalty < 0):
            raise SchemaError(f"{where}.penalty must be a non-negative number")

    chronology = data.get("chronology", "InterProblemChronology")
    if chronology not in CHRONOLOGIES:
        raise SchemaError(f"'chronology' must be one of {list(CHRONOLOGIES)}")

    span = _require_mapping(data.get("span"), "span")
    _require_keys(span, ("start", "steps"), "span")
    if not isinstance(span["steps"], int) or span["steps"] <= 0:
        raise SchemaError("span.steps must be a positive integer")

    store = _require_mapping(data.get("store", {}), "store")
    if store.get("backend", "file") not in STORE_BACKENDS:
        raise SchemaError(f"store.backend must be one of {list(STORE_BACKENDS)}")
    batch = store.get("write_batch_min")
    if batch is not None and (not isinstance(batch, int) or batch < MIN_WRITE_BATCH):
        raise SchemaError(f"store.write_batch_min must be an integer >= {MIN_WRITE_BATCH}")
    entries = store.get("read_cache_entries")
    if entries is not None and (not isinstance(entries, int) or entries <= 0):
        raise SchemaError("store.read_cache_entries must be a positive integer")

    policy = data.get("on_infeasible", "halt")
    if policy not in INFEASIBILITY_POLICIES:
        raise SchemaError(f"'on_infeasible' must be one of {list(INFEASIBILITY_POLICIES)}")
