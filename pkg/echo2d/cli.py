"""Command-line entry point.

Command output goes to stdout; structured logs go to stderr. Exit codes:
0 success, 2 invalid configuration, 3 numerical contract violation.
"""

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path

import structlog
from dotenv import load_dotenv
from pydantic import ValidationError

from echo2d import __version__
from echo2d.config import configure_logging
from echo2d.errors import ConfigError, Echo2DError
from echo2d.schemas.run import SystemConfig
from echo2d.services.oracle_check import (
    DEFAULT_SAMPLES,
    DEFAULT_SETS,
    DEFAULT_TOLERANCE,
    check_oracle_triangle,
)
from echo2d.services.outputs import encode_json, encode_traces_csv, pathway_record
from echo2d.services.pathways import ExperimentKind, render_diagram, render_pathways
from echo2d.services.presets import PRESETS, preset_system
from echo2d.services.response import pathway_amplitudes
from echo2d.services.runner import (
    build_system,
    compute_traces,
    field_set,
    load_config,
    run,
)
from echo2d.services.units import DEFAULT_UNITS, FrequencyUnit

logger = structlog.get_logger()


def _system_config(args: argparse.Namespace) -> SystemConfig:
    if args.config:
        return load_config(args.config).system
    return preset_system(args.preset)


def _emit(text: str, output: str | None = None) -> None:
    if output:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot write {output}: {e}") from e
    else:
        sys.stdout.write(text)


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    output_dir = Path(args.output_dir) if args.output_dir else None
    manifest = run(config, workers=args.threads, output_dir=output_dir)
    _emit(manifest.model_dump_json(indent=2) + "\n")
    return 0


def cmd_pathways(args: argparse.Namespace) -> int:
    system, _ = build_system(_system_config(args))
    kind = ExperimentKind(args.kind)
    amps = pathway_amplitudes(system, kind)
    if args.diagrams:
        text = render_pathways([a.pathway for a in amps if a.pathway is not None])
    else:
        payload = {
            "kind": kind.value,
            "levels": list(system.labels),
            "pathways": [pathway_record(a) for a in amps],
        }
        text = encode_json(payload).decode()
    _emit(text, args.output)
    return 0


def cmd_diagram(args: argparse.Namespace) -> int:
    system, _ = build_system(_system_config(args))
    amps = pathway_amplitudes(system, ExperimentKind(args.kind))
    if not 1 <= args.index <= len(amps):
        raise ConfigError(f"--index must lie between 1 and {len(amps)}")
    pathway = amps[args.index - 1].pathway
    assert pathway is not None
    _emit(render_diagram(pathway).text + "\n")
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if not config.trace_peaks:
        raise ConfigError("the config defines no trace_peaks")
    system, _ = build_system(config.system)
    blocks = []
    for kind in config.experiment:
        if kind is ExperimentKind.TWO_QUANTUM:
            continue
        amps = pathway_amplitudes(system, kind, field_set(config.pulses))
        traces = compute_traces(config, kind, amps)
        if traces:
            table = encode_traces_csv(config.trace_delays(), traces).decode()
            blocks.append(f"# {kind.value}\n{table}")
    _emit("\n".join(blocks))
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    system = None
    if args.config:
        system, _ = build_system(load_config(args.config).system)
    report = check_oracle_triangle(
        n_sets=args.sets,
        n_samples=args.samples,
        seed=args.seed,
        tolerance=args.tolerance,
        system=system,
    )
    _emit(json.dumps(report.to_dict(), indent=2) + "\n")
    report.raise_for_tolerance()
    return 0


def cmd_convert_units(args: argparse.Namespace) -> int:
    omega = DEFAULT_UNITS.to_rad_per_fs(args.value, args.unit)
    payload = {
        "value": args.value,
        "unit": args.unit,
        "converted": DEFAULT_UNITS.all_units(omega),
    }
    _emit(json.dumps(payload, indent=2) + "\n")
    return 0


def _add_system_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", help="Run config whose system is used")
    source.add_argument(
        "--preset",
        default="coupled",
        choices=sorted(PRESETS),
        help="Built-in dimer (default: coupled)",
    )
    parser.add_argument(
        "--kind",
        default=ExperimentKind.REPHASING.value,
        choices=[kind.value for kind in ExperimentKind],
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="echo2d",
        description=(
            "Simulate third-order pathways and 2D coherent spectra of exciton systems."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument(
        "--log-level", default=None, help="debug, info, warning or error"
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="Grid workers (overrides ECHO2D_THREADS)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser(
        "simulate", help="Run a JSON config and write its outputs"
    )
    simulate.add_argument("config")
    simulate.add_argument("--output-dir", help="Override the config's output_dir")
    simulate.set_defaults(handler=cmd_simulate)

    pathways = commands.add_parser(
        "pathways", help="List the pathways of one experiment"
    )
    _add_system_source(pathways)
    pathways.add_argument(
        "--diagrams", action="store_true", help="Print diagrams, not JSON"
    )
    pathways.add_argument("--output", help="Write to this file instead of stdout")
    pathways.set_defaults(handler=cmd_pathways)

    diagram = commands.add_parser("diagram", help="Render one pathway diagram")
    _add_system_source(diagram)
    diagram.add_argument("--index", type=int, default=1, help="1-based pathway number")
    diagram.set_defaults(handler=cmd_diagram)

    trace = commands.add_parser("trace", help="Print waiting-time traces as CSV")
    trace.add_argument("config")
    trace.set_defaults(handler=cmd_trace)

    oracle = commands.add_parser(
        "oracle-check", help="Cross-check the evaluation routes"
    )
    oracle.add_argument(
        "--config", help="Check this config's system instead of random dimers"
    )
    oracle.add_argument("--sets", type=int, default=DEFAULT_SETS)
    oracle.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    oracle.add_argument("--seed", type=int, default=0, help="RNG seed")
    oracle.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    oracle.set_defaults(handler=cmd_oracle_check)

    convert = commands.add_parser(
        "convert-units", help="Express a value in meV, THz and rad/fs"
    )
    convert.add_argument("value", type=float)
    convert.add_argument("unit", choices=[unit.value for unit in FrequencyUnit])
    convert.set_defaults(handler=cmd_convert_units)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return int(args.handler(args))
    except Echo2DError as e:
        logger.error("Command failed", command=args.command, error=str(e))
        sys.stderr.write(f"echo2d: {e}\n")
        return e.exit_code
    except ValidationError as e:
        logger.error("Invalid input", command=args.command, error=str(e))
        sys.stderr.write(f"echo2d: {e}\n")
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
