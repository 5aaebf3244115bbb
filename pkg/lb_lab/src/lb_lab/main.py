"""Command-line entry point."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from lb_lab.config import APP_NAME, APP_VERSION, OUTPUT_ROOT
from lb_lab.errors import ConfigError, TraceWriteError
from lb_lab.models.experiment import PRESETS, ExperimentSpec
from lb_lab.services import harness_service
from lb_lab.services.config_loader import load_spec
from lb_lab.utils.logging import logger

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2


def _add_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="flat KEY=VALUE experiment file")
    source.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario preset")
    parser.add_argument("--criterion", help="periodic:<p> or auto")
    parser.add_argument("--seed", help="RNG seed (unsigned integer)")
    parser.add_argument("--steps", help="number of iterations")
    parser.add_argument("--out", type=Path, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME, description="Partitioning and load-balancing laboratory")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser("run", help="run one experiment and write its traces")
    _add_source(run_cmd)
    run_cmd.add_argument("--partitioner", help="norcb, rcb, rib or hsfc")

    compare_cmd = commands.add_parser("compare", help="compare partitioners on identical physics")
    _add_source(compare_cmd)
    compare_cmd.add_argument("--partitioners", required=True, help="comma-separated list, e.g. norcb,rcb,rib,hsfc")
    compare_cmd.add_argument("--workers", type=int, default=1, help="parallel runs")
    compare_cmd.add_argument("--xlsx", action="store_true", help="also write comparison.xlsx")

    sweep_cmd = commands.add_parser("sweep", help="compare over several seeds and report medians")
    _add_source(sweep_cmd)
    sweep_cmd.add_argument("--partitioners", required=True, help="comma-separated list")
    sweep_cmd.add_argument("--seeds", required=True, help="comma-separated list of seeds")
    sweep_cmd.add_argument("--workers", type=int, default=1, help="parallel runs")
    return parser


def _split(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _load(args: argparse.Namespace, partitioner: Optional[str] = None) -> ExperimentSpec:
    overrides = {
        "criterion": args.criterion,
        "seed": args.seed,
        "steps": args.steps,
        "partitioner": partitioner,
    }
    return load_spec(config=args.config, preset=args.preset, overrides=overrides)


def _default_out(args: argparse.Namespace, spec: Optional[ExperimentSpec] = None) -> Path:
    """`--out`, then the config's OUTPUT_DIR, then a directory under OUTPUT_ROOT."""
    if args.out is not None:
        return args.out
    if spec is not None and spec.output_dir is not None:
        return spec.output_dir
    name = args.preset if args.preset else args.config.stem
    return OUTPUT_ROOT / name


def _specs(args: argparse.Namespace) -> list[ExperimentSpec]:
    names = _split(args.partitioners)
    if len(names) < 2:
        raise ConfigError("--partitioners needs at least two entries")
    return [_load(args, name) for name in names]


def _run(args: argparse.Namespace) -> int:
    spec = _load(args, args.partitioner)
    out = _default_out(args, spec)
    if args.out is None and spec.output_dir is None:
        out = out / spec.name
    result = harness_service.run(spec.model_copy(update={"output_dir": out}))
    print(f"{result.label}: modeled_time={result.modeled_time!r} lb_calls={result.lb_call_count} -> {out}")
    return EXIT_OK


def _compare(args: argparse.Namespace) -> int:
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    specs = _specs(args)
    out = _default_out(args, specs[0])
    report, _ = harness_service.compare(specs, workers=args.workers, out_dir=out, xlsx=args.xlsx)
    print(report.summary.to_string(index=False))
    print(f"winner: {report.winner} -> {out}")
    return EXIT_OK


def _sweep(args: argparse.Namespace) -> int:
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    try:
        seeds = [int(s) for s in _split(args.seeds)]
    except ValueError:
        raise ConfigError(f"--seeds must be integers, got '{args.seeds}'") from None
    if any(s < 0 for s in seeds):
        raise ConfigError("--seeds must be non-negative")
    specs = _specs(args)
    out = _default_out(args, specs[0])
    medians = harness_service.sweep(specs, seeds, workers=args.workers, out_dir=out)
    print(medians.to_string(index=False))
    return EXIT_OK


COMMANDS = {"run": _run, "compare": _compare, "sweep": _sweep}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (TraceWriteError, OSError) as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
