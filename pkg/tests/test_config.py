"""Simulation config parsing, schema validation and logging setup."""

import json
import logging
from datetime import datetime, timedelta
from pathlib import Path

import pandas as pd
import pytest

from src.config import (
    ConfigManager,
    SchemaError,
    close_log_file,
    duration_text,
    load_document,
    log_level_from_env,
    parse_duration,
    setup_logging,
    validate_config_schema,
)
from src.system.cases import five_bus_config


def write_config(tmp_path, data, name="simulation.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


class TestDocuments:
    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_document(tmp_path / "absent.json")

    def test_non_mapping(self, tmp_path):
        with pytest.raises(SchemaError):
            load_document(write_config(tmp_path, [1, 2, 3]))

    def test_yaml_is_accepted(self, tmp_path):
        path = tmp_path / "doc.yaml"
        path.write_text("system: system.json\nspan:\n  steps: 2\n")
        assert load_document(path)["span"] == {"steps": 2}

    @pytest.mark.parametrize(
        "value, expected",
        [("1h", timedelta(hours=1)), ("15min", timedelta(minutes=15)), (30, timedelta(minutes=30))],
    )
    def test_parse_duration(self, value, expected):
        assert parse_duration(value, "x") == pd.Timedelta(expected)

    @pytest.mark.parametrize("value", ["0h", -5, "soon"])
    def test_bad_duration(self, value):
        with pytest.raises(SchemaError):
            parse_duration(value, "models[0].resolution")

    def test_duration_text(self):
        assert duration_text(timedelta(hours=24)) == "24h"
        assert duration_text(timedelta(minutes=15)) == "15min"
        assert duration_text(timedelta(seconds=90)) == "90s"


class TestSchema:
    def test_generated_config_is_valid(self):
        validate_config_schema(five_bus_config(1))

    @pytest.mark.parametrize(
        "change, message",
        [
            (lambda d: d.pop("system"), "'system' must be"),
            (lambda d: d.update(models=[]), "'models' must be a non-empty list"),
            (lambda d: d["models"][1].update(name="UC"), "name duplicates"),
            (lambda d: d["models"][0].update(template="nope"), "references unknown template"),
            (lambda d: d["models"][0].update(horizon=0), "horizon must be a positive"),
            (lambda d: d["models"][0].update(chronology="Sideways"), "chronology must be one of"),
            (lambda d: d["feedforwards"][0].update(kind="Magic"), "kind must be one of"),
            (lambda d: d["feedforwards"][0].update(target="RT"), "references unknown model"),
            (lambda d: d["span"].update(steps=0), "span.steps must be a positive integer"),
            (lambda d: d["store"].update(backend="s3"), "store.backend must be one of"),
            (lambda d: d["store"].update(write_batch_min=1024), "write_batch_min must be an integer >= 4096"),
            (lambda d: d.update(on_infeasible="retry"), "'on_infeasible' must be one of"),
            (lambda d: d["models"][0]["solver"].update(engine="cplex"), "engine must be one of"),
            (
                lambda d: d["templates"]["economic_dispatch"]["devices"].update(ThermalGen="Magic"),
                "devices.ThermalGen must be one of",
            ),
        ],
    )
    def test_rejections(self, change, message):
        data = five_bus_config(1)
        change(data)
        with pytest.raises(SchemaError, match=message):
            validate_config_schema(data)


class TestConfigManager:
    def test_typed_view(self, tmp_path):
        manager = ConfigManager(write_config(tmp_path, five_bus_config(2)))
        config = manager.config
        assert manager.list_models() == ["UC", "ED", "Emulator"]
        assert manager.list_templates() == ["unit_commitment", "economic_dispatch"]
        assert config.system_path == (tmp_path / "system.json").resolve()
        assert config.output_dir == (tmp_path / "output").resolve()
        assert config.start == datetime(2024, 1, 1)
        assert config.steps == 2
        uc = config.models[0]
        assert (uc.horizon, uc.resolution, uc.interval) == (48, timedelta(hours=1), timedelta(hours=24))
        assert uc.solver["mip_gap"] == 1e-3
        assert uc.solver["node_limit"] == 100_000
        assert config.store["write_batch_min"] == 1024 * 1024
        assert config.emulator.resolution == timedelta(hours=1)

    def test_output_override(self, tmp_path):
        manager = ConfigManager(write_config(tmp_path, five_bus_config(1)), output_dir=tmp_path / "elsewhere")
        assert manager.config.output_dir == (tmp_path / "elsewhere").resolve()

    def test_template_lookup(self, tmp_path):
        manager = ConfigManager(write_config(tmp_path, five_bus_config(1)))
        assert manager.template("economic_dispatch")["network"] == {"formulation": "CopperPlate", "use_slacks": True}
        assert manager.template({"network": "PTDFDCPower"})["network"] == {
            "formulation": "PTDFDCPower",
            "use_slacks": False,
        }
        with pytest.raises(SchemaError, match="unknown template"):
            manager.template("missing")

    def test_resolved_reloads_identically(self, tmp_path):
        manager = ConfigManager(write_config(tmp_path, five_bus_config(1)))
        resolved = manager.resolved()
        assert resolved["models"][0]["resolution"] == "1h"
        assert isinstance(resolved["models"][0]["template"], dict)
        other = tmp_path / "copy"
        other.mkdir()
        reloaded = ConfigManager(write_config(other, resolved, "resolved.json"))
        assert reloaded.config == manager.config
        assert reloaded.resolved() == resolved


class TestLogging:
    def test_level_from_env(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("OPSIM_LOG", "debug")
        assert log_level_from_env() == "DEBUG"
        monkeypatch.delenv("OPSIM_LOG")
        assert log_level_from_env("WARNING") == "WARNING"

    def test_file_handler_is_replaced(self, tmp_path):
        setup_logging("INFO", tmp_path / "a.log")
        setup_logging("INFO", tmp_path / "b.log")
        logging.getLogger("opsim.test").info("hello")
        close_log_file()
        assert "hello" in (tmp_path / "b.log").read_text()
        assert "hello" not in (tmp_path / "a.log").read_text()


def test_example_config_parses():
    manager = ConfigManager(Path(__file__).resolve().parents[1] / "config.yaml")
    assert manager.list_models() == ["UC", "ED", "Emulator"]
    assert manager.config.models[1].template["network"] == {"formulation": "PTDFDCPower", "use_slacks": True}
    assert manager.config.system_path.name == "system.json"
    assert manager.config.feedforwards[2]["kind"] == "EnergyTarget"
