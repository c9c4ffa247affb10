"""Command-line surface: validate, run and export."""

import json

import pandas as pd
import pytest

from src.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main


def test_validate_valid_case(five_bus_case, capsys):
    assert main(["validate", str(five_bus_case.config)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "valid" in out
    assert "'ED': 24" in out


def test_validate_reports_findings(five_bus_case, capsys):
    config = json.loads(five_bus_case.config.read_text())
    config["models"][1]["horizon"] = 60
    five_bus_case.config.write_text(json.dumps(config))
    assert main(["validate", str(five_bus_case.config)]) == EXIT_INVALID
    assert "invalid: model 'ED'" in capsys.readouterr().err


def test_validate_schema_error(five_bus_case, capsys):
    config = json.loads(five_bus_case.config.read_text())
    config["span"]["steps"] = 0
    five_bus_case.config.write_text(json.dumps(config))
    assert main(["validate", str(five_bus_case.config)]) == EXIT_INVALID
    assert capsys.readouterr().err.startswith("error:")


def test_missing_config(tmp_path):
    assert main(["validate", str(tmp_path / "absent.json")]) == EXIT_INVALID


def test_run_then_export(five_bus_case, tmp_path, capsys):
    output = tmp_path / "run"
    assert main(["run", str(five_bus_case.config), "--output", str(output), "--log-level", "info"]) == EXIT_OK
    assert f"results: {output}" in capsys.readouterr().out
    assert "Simulation finished" in (output / "logs" / "simulation.log").read_text()

    csv_path = tmp_path / "ed_power.csv"
    args = ["export", str(output), "--model", "ED", "--name", "ActivePower", "--to", str(csv_path)]
    assert main(args) == EXIT_OK
    frame = pd.read_csv(csv_path)
    assert frame["realized_flag"].all()
    assert frame["execution_time"].nunique() == 24

    assert main([*args[:-1], str(tmp_path / "all.csv"), "--lookahead"]) == EXIT_OK
    assert len(pd.read_csv(tmp_path / "all.csv")) == 2 * len(frame)


def test_export_unknown_result(five_bus_case, tmp_path, capsys):
    output = tmp_path / "run"
    assert main(["run", str(five_bus_case.config), "--output", str(output)]) == EXIT_OK
    args = ["export", str(output), "--model", "ED", "--name", "Nothing", "--to", str(tmp_path / "x.csv")]
    assert main(args) == EXIT_FAILED
    assert "no result registered" in capsys.readouterr().err


def test_export_missing_output(tmp_path, capsys):
    args = ["export", str(tmp_path / "absent"), "--model", "ED", "--name", "ActivePower", "--to", "x.csv"]
    assert main(args) == EXIT_FAILED
    assert "no simulation output directory" in capsys.readouterr().err


def test_export_rejects_unknown_kind(tmp_path):
    with pytest.raises(SystemExit):
        main(["export", str(tmp_path), "--model", "ED", "--name", "x", "--kind", "guess", "--to", "x.csv"])
