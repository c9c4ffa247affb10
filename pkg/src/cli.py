"""Command-line entry point: ``opsim validate|run|export``.

Exit codes:
    0  success
    1  invalid input (config, system data, timing or wiring)
    2  runtime failure (infeasible solve, missing results, I/O)
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from src.config.manager import ConfigManager
from src.config.settings import close_log_file, setup_logging
from src.errors import OpsimError
from src.formulations.builder import check_coverage
from src.formulations.errors import BuildError
from src.sequence.errors import SequenceValidationError
from src.sequence.timing import SimulationSpan
from src.sequence.validation import validate_sequence
from src.simulation.execute import run_simulation
from src.simulation.results import load_results
from src.simulation.simulation import simulation_from_config
from src.store.keys import RESULT_KINDS, VARIABLE

logger = logging.getLogger("opsim")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2

LOG_FILE = Path("logs") / "simulation.log"

INVALID_INPUT = (ValueError, FileNotFoundError)


def _exit_code(error: Exception) -> int:
    return EXIT_INVALID if isinstance(error, INVALID_INPUT) else EXIT_FAILED


def cmd_validate(config_path: str | Path) -> int:
    """Load the system, check template coverage and validate the sequence."""
    try:
        sim = simulation_from_config(ConfigManager(config_path))
        findings: list[str] = []
        for definition in [*sim.models, *([sim.emulator] if sim.emulator is not None else [])]:
            try:
                check_coverage(definition.template, sim.system)
            except BuildError as exc:
                findings.append(f"{definition.name}: {exc}")
        if sim.models:
            span = SimulationSpan(sim.start, sim.steps, sim.models[0].interval)
            try:
                report = validate_sequence(sim.definition_sequence(), sim.system, span)
            except SequenceValidationError as exc:
                findings.extend(exc.findings)
            else:
                print(f"Executions per step: {report.executions_per_step}")
        else:
            findings.append("no decision models")
    except (OpsimError, *INVALID_INPUT) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    if findings:
        for finding in findings:
            print(f"invalid: {finding}", file=sys.stderr)
        return EXIT_INVALID
    print(f"{config_path}: valid")
    return EXIT_OK


def cmd_run(config_path: str | Path, output_dir: str | Path | None = None, log_level: str | None = None) -> int:
    """Build and execute the simulation; results land in ``<output>/store``."""
    try:
        manager = ConfigManager(config_path, output_dir=output_dir)
    except (OpsimError, *INVALID_INPUT) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    output = manager.config.output_dir
    setup_logging(log_level, output / LOG_FILE)
    try:
        results = run_simulation(simulation_from_config(manager))
        results.close()
    except (OpsimError, *INVALID_INPUT) as exc:
        logger.error("Simulation failed: %s", exc)
        diagnostics = getattr(exc, "diagnostics", None)
        if diagnostics is not None:
            print(f"diagnostics: {diagnostics}", file=sys.stderr)
        return _exit_code(exc)
    finally:
        close_log_file()
    print(f"results: {output}")
    return EXIT_OK


def cmd_export(
    output_dir: str | Path,
    model: str,
    name: str,
    csv_path: str | Path,
    kind: str = VARIABLE,
    include_lookahead: bool = False,
) -> int:
    """Write one result key as CSV; realized rows only unless ``include_lookahead``."""
    try:
        results = load_results(output_dir)
        try:
            path = results.export(model, name, csv_path, kind=kind, include_lookahead=include_lookahead)
        finally:
            results.close()
    except (OpsimError, *INVALID_INPUT) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opsim", description="Quasi-static power system operations simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", help="Check a simulation config without solving")
    validate.add_argument("config", help="Path to the simulation config")

    run = commands.add_parser("run", help="Build and execute a simulation")
    run.add_argument("config", help="Path to the simulation config")
    run.add_argument("--output", default=None, help="Output directory (overrides the config)")
    run.add_argument("--log-level", default=None, help="Log level (overrides OPSIM_LOG)")

    export = commands.add_parser("export", help="Export one result to CSV")
    export.add_argument("output_dir", help="Output directory of a simulation")
    export.add_argument("--model", required=True, help="Model name")
    export.add_argument("--name", required=True, help="Variable, parameter or row family name")
    export.add_argument("--kind", default=VARIABLE, choices=RESULT_KINDS, help="Result kind")
    export.add_argument("--lookahead", action="store_true", help="Include look-ahead rows")
    export.add_argument("--to", required=True, dest="csv_path", help="CSV file to write")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level.upper() if getattr(args, "log_level", None) else None)
    if args.command == "validate":
        return cmd_validate(args.config)
    if args.command == "run":
        return cmd_run(args.config, args.output, args.log_level.upper() if args.log_level else None)
    return cmd_export(args.output_dir, args.model, args.name, args.csv_path, args.kind, args.lookahead)


if __name__ == "__main__":
    sys.exit(main())
