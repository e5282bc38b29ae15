"""Command-line driver.

Exit codes: 0 success, 1 configuration error, 2 no bracketed root,
3 controller parameter error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ConfigError, ControllerParameterError, NoRootError, TraceFormatError, TraceIOError
from .experiment import (
    ExperimentConfig,
    compare,
    frequency_key,
    run_sweep,
    solve_for_config,
    summarize,
)
from .spine_controller import ControllerKind
from .trace_io import dump_json, write_summary, write_trace

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_ROOT = 2
EXIT_CONTROLLER = 3
EXIT_IO = 4

log = logging.getLogger("spinebalance")


def load_config(path, seed=None) -> ExperimentConfig:
    data = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    config = ExperimentConfig.from_dict(data)
    if seed is not None:
        if seed < 0:
            raise ConfigError("--seed must be non-negative")
        config = replace(config, sweep=replace(config.sweep, seed=seed))
    return config


def _emit(obj):
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _out_dir(args, config) -> Path:
    return Path(args.out if args.out is not None else config.output_dir)


def _write_kind(config, kind, out: Path, jobs: int) -> dict:
    records = run_sweep(config, kind, jobs=jobs)
    kdir = out / kind.value
    for rec in records:
        fi = config.sweep.frequencies.index(rec.frequency)
        write_trace(rec, kdir / f"f{fi:02d}_r{rec.repetition:02d}.csv")
    summary = {
        "controller": kind.value,
        "seed": config.sweep.seed,
        "frequencies": summarize(records, config.sweep.frequencies),
    }
    write_summary(summary, kdir / "summary.json")
    return {"controller": kind.value, "records": len(records), "directory": str(kdir)}


def cmd_solve(args, config):
    result = solve_for_config(config)
    _emit(result.to_dict())


def cmd_simulate(args, config):
    kind = ControllerKind.parse(args.controller)
    _emit(_write_kind(config, kind, _out_dir(args, config), args.jobs))


def cmd_sweep(args, config):
    out = _out_dir(args, config)
    _emit([_write_kind(config, kind, out, args.jobs) for kind in ControllerKind])


def cmd_compare(args, config):
    result = compare(config, jobs=args.jobs)
    if args.out is not None:
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise TraceIOError(f"{out}: {exc.strerror or exc}") from exc
        dump_json(result, out / "comparison.json")
    _emit(result)
    if args.table:
        _print_table(result)


def _print_table(result):
    names = ("mean_abs_roll", "mean_abs_pitch", "half_stride_signed_area")
    err = sys.stderr
    err.write(f"{'freq':>6} {'controller':<14}" + "".join(f"{n:>26}" for n in names) + "\n")
    for row in result["rows"]:
        err.write(f"{row['frequency']:>6.2f} {row['controller']:<14}" + "".join(f"{row[n]:>26.6g}" for n in names) + "\n")
    for f, w in result["winners"].items():
        err.write(f"{f:>6} winners: " + ", ".join(f"{k}={v}" for k, v in w.items() if k in names) + "\n")


def cmd_print_default_config(args, config):
    _emit(ExperimentConfig().to_dict())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON experiment config (missing keys keep defaults)")
    common.add_argument("--out", metavar="DIR", help="output directory (default: config output_dir)")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="parallel worker processes")
    common.add_argument("--seed", type=int, default=None, metavar="N", help="override the config seed")
    common.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")

    parser = argparse.ArgumentParser(prog="spinebalance", description="Spinal-flexion balance model for a trotting quadruped.")
    parser.add_argument("--print-default-config", action="store_true", help="print the default JSON config and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("solve", parents=[common], help="solve the balancing flexion R'")
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("simulate", parents=[common], help="run the frequency sweep for one controller")
    p.add_argument(
        "--controller",
        default="balance-spine",
        choices=[k.cli_name for k in ControllerKind],
        help="controller kind (default: balance-spine)",
    )
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("sweep", parents=[common], help="run the frequency sweep for all controllers")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("compare", parents=[common], help="rank the controllers per frequency")
    p.add_argument("--table", action="store_true", help="also print a text table to stderr")
    p.set_defaults(func=cmd_compare)
    p = sub.add_parser("print-default-config", help="print the default JSON config")
    p.set_defaults(func=cmd_print_default_config)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    if args.print_default_config:
        cmd_print_default_config(args, None)
        return EXIT_OK
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    try:
        config = None
        if args.command != "print-default-config":
            if args.jobs < 1:
                raise ConfigError("--jobs must be >= 1")
            config = load_config(args.config, args.seed)
        args.func(args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoRootError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_NO_ROOT
    except ControllerParameterError as exc:
        print(f"controller error: {exc}", file=sys.stderr)
        return EXIT_CONTROLLER
    except (TraceIOError, TraceFormatError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


__all__ = ["main", "build_parser", "load_config", "frequency_key"]
