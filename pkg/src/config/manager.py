"""Configuration loader for simulation configs.

Reads the JSON config document, validates its structure, resolves template
references and relative paths, and exposes the typed ``SimulationConfig``
plus the fully resolved document written next to the results.
"""

from __future__ import annotations

import copy
from pathlib import Path
from typing import Any, Union

from .documents import load_document
from .schema import SchemaError, validate_config_schema
from .specs import (
    EmulatorConfig,
    ModelConfig,
    SimulationConfig,
    duration_text,
    to_datetime,
    to_timedelta,
)

SOLVER_DEFAULTS = {"engine": "bundled", "max_iterations": 50_000, "node_limit": 100_000, "mip_gap": 1e-6}
STORE_DEFAULTS = {"backend": "file", "write_batch_min": 1024 * 1024, "read_cache_entries": 64, "compress": True}
DEFAULT_OUTPUT_DIR = "output"


class ConfigManager:
    """Manage access to a simulation config document.

    The document names the system descriptor, decision models (with templates
    given inline or by name from ``templates``), an optional emulator,
    feedforwards, the span and store options.

    Args:
        config_path: Path to the JSON configuration file.
        output_dir: Overrides the ``output_dir`` of the document.
    """

    def __init__(self, config_path: Union[str, Path], output_dir: Union[str, Path, None] = None):
        self.config_path = Path(config_path).resolve()
        self._data = self._load()
        validate_config_schema(self._data)
        self._output_override = Path(output_dir).resolve() if output_dir is not None else None
        self._config = self._parse()

    def _load(self) -> dict[str, Any]:
        return load_document(self.config_path)

    @property
    def raw(self) -> dict[str, Any]:
        """Return the document as loaded."""
        return self._data

    @property
    def config(self) -> SimulationConfig:
        return self._config

    def list_models(self) -> list[str]:
        return self._config.model_names

    def list_templates(self) -> list[str]:
        return list(self._data.get("templates", {}).keys())

    def _path(self, value: str) -> Path:
        path = Path(value)
        return path if path.is_absolute() else (self.config_path.parent / path).resolve()

    def template(self, ref: Union[str, dict[str, Any]]) -> dict[str, Any]:
        """Inline form of a template reference, network normalized to a mapping."""
        if isinstance(ref, str):
            try:
                ref = self._data["templates"][ref]
            except KeyError:
                raise SchemaError(f"unknown template '{ref}'") from None
        template = copy.deepcopy(ref)
        network = template.get("network", {"formulation": "CopperPlate"})
        if isinstance(network, str):
            network = {"formulation": network}
        network.setdefault("use_slacks", False)
        return {
            "network": network,
            "devices": dict(template.get("devices", {})),
            "services": dict(template.get("services", {})),
        }

    def _parse(self) -> SimulationConfig:
        data = self._data
        models = [
            ModelConfig(
                name=m["name"],
                template=self.template(m["template"]),
                horizon=m["horizon"],
                resolution=to_timedelta(m["resolution"], f"models[{i}].resolution"),
                interval=to_timedelta(m["interval"], f"models[{i}].interval"),
                chronology=m.get("chronology"),
                solver={**SOLVER_DEFAULTS, **m.get("solver", {})},
            )
            for i, m in enumerate(data["models"])
        ]
        emulator = None
        if data.get("emulator") is not None:
            e = data["emulator"]
            emulator = EmulatorConfig(
                name=e["name"],
                template=self.template(e["template"]),
                resolution=to_timedelta(e["resolution"], "emulator.resolution"),
                solver={**SOLVER_DEFAULTS, **e.get("solver", {})},
            )
        feedforwards = data.get("feedforwards") or []
        if isinstance(feedforwards, dict):
            feedforwards = [feedforwards]
        output_dir = self._output_override or self._path(data.get("output_dir", DEFAULT_OUTPUT_DIR))
        return SimulationConfig(
            system_path=self._path(data["system"]),
            models=models,
            emulator=emulator,
            feedforwards=[dict(f) for f in feedforwards],
            chronology=data.get("chronology", "InterProblemChronology"),
            start=to_datetime(data["span"]["start"], "span.start"),
            steps=data["span"]["steps"],
            store={**STORE_DEFAULTS, **data.get("store", {})},
            output_dir=output_dir,
            on_infeasible=data.get("on_infeasible", "halt"),
        )

    def resolved(self) -> dict[str, Any]:
        """The config with absolute paths, defaults filled and templates inlined.

        Loading the returned document reproduces this configuration exactly.
        """
        c = self._config
        document: dict[str, Any] = {
            "system": str(c.system_path),
            "models": [
                {
                    "name": m.name,
                    "template": m.template,
                    "horizon": m.horizon,
                    "resolution": duration_text(m.resolution),
                    "interval": duration_text(m.interval),
                    "solver": m.solver,
                    **({"chronology": m.chronology} if m.chronology else {}),
                }
                for m in c.models
            ],
            "feedforwards": c.feedforwards,
            "chronology": c.chronology,
            "span": {"start": c.start.isoformat(), "steps": c.steps},
            "store": c.store,
            "output_dir": str(c.output_dir),
            "on_infeasible": c.on_infeasible,
        }
        if c.emulator is not None:
            document["emulator"] = {
                "name": c.emulator.name,
                "template": c.emulator.template,
                "resolution": duration_text(c.emulator.resolution),
                "solver": c.emulator.solver,
            }
        return document
