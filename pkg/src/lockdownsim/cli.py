"""Command-line entry point: ``lockdownsim run|sweep|compare|synth|calibrate``.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config
from .population import SchemaError, split_valid, write_households, write_tract_file
from .scenario import (RunError, compare_runs, format_table, load_population, run_scenario,
                       run_sweep, write_csv)
from .simulate import SimulationError, calibrate_population
from .wellbeing import CalibrationError

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
log = logging.getLogger("lockdownsim")


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _add_common(p: argparse.ArgumentParser, out_default: str | None = None):
    p.add_argument("--config", "-c", help="scenario YAML file (defaults are used when omitted)")
    p.add_argument("--seed", type=int, help="master seed for all random draws")
    p.add_argument("--out", "-o", default=out_default, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lockdownsim",
                                     description="Household income-shock microsimulation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario")
    _add_common(run)
    run.add_argument("--case", choices=["A", "B", "C"], type=str.upper)
    run.add_argument("--tc", type=_positive_float, help="crisis duration in months")
    run.add_argument("--exclusion", type=float, help="benefit exclusion rate in [0, 1]")
    run.add_argument("--workers", type=int, default=1, help="worker processes (results unchanged)")

    sweep = sub.add_parser("sweep", help="one run per crisis duration, or per exclusion bound")
    _add_common(sweep)
    sweep.add_argument("--case", choices=["A", "B", "C"], type=str.upper)
    sweep.add_argument("--over", choices=["crisis", "exclusion"], default="crisis",
                       help="sweep the crisis duration (default) or case C exclusion bounds")
    sweep.add_argument("--workers", type=int, default=1)

    cmp_ = sub.add_parser("compare", help="compare completed runs side by side")
    cmp_.add_argument("runs", nargs="+", help="run directories")
    cmp_.add_argument("--out", "-o", help="also write the table as CSV")

    synth = sub.add_parser("synth", help="write the population file only")
    _add_common(synth)
    synth.add_argument("--households", type=int, help="number of households to synthesize")
    synth.add_argument("--tracts", action="store_true",
                       help="write tract totals instead of one row per household")

    cal = sub.add_parser("calibrate", help="print the savings-utility calibration report")
    _add_common(cal)
    return parser


def _config(args):
    cfg = load_config(args.config)
    return cfg.with_overrides(
        case=getattr(args, "case", None), crisis_months=getattr(args, "tc", None),
        seed=args.seed, output=getattr(args, "out", None),
        exclusion_rate=getattr(args, "exclusion", None))


def _cmd_run(args) -> int:
    cfg = _config(args)
    run = run_scenario(cfg, workers=max(1, args.workers))
    s = run.summary
    p, r = s["poverty"], s["recovery"]
    print(f"case {s['case']}, T_C={s['crisis_months']:g} months -> {run.directory}")
    print(f"  poverty {100 * p['initial_rate']:.2f}% -> {100 * p['end_of_crisis_rate']:.2f}% "
          f"(deep {100 * p['deep_initial_rate']:.2f}% -> {100 * p['deep_end_of_crisis_rate']:.2f}%)")
    if r["mean"] is not None:
        print(f"  recovery of affected: mean {r['mean']:.2f}, median {r['median']:.2f} months")
    if s["failed_households"]:
        print(f"  {s['failed_households']} household(s) failed numerically", file=sys.stderr)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _config(args)
    runs = run_sweep(cfg, workers=max(1, args.workers), over=args.over)
    out = runs[0].directory.parent
    print(f"{len(runs)} runs -> {out}; summary in {out / 'sweep.csv'}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    header, rows = compare_runs(args.runs)
    print(format_table(header, rows))
    if args.out:
        write_csv(Path(args.out), header, rows)
    return EXIT_OK


def _cmd_synth(args) -> int:
    cfg = load_config(args.config)
    if not cfg.population.synthetic:
        raise ConfigError("synth needs a synthesized population source")
    src = cfg.population
    cfg = replace(cfg, population=replace(
        src, households=args.households or src.households,
        seed=args.seed if args.seed is not None else src.seed))
    pop = load_population(cfg)
    out = Path(args.out or "population.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    (write_tract_file if args.tracts else write_households)(out, pop.households)
    print(f"{len(pop)} households -> {out} (sha256 {pop.digest()[:12]})")
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    cfg = _config(args)
    pop = load_population(cfg)
    valid, _ = split_valid(pop.households, cfg.economy)
    report = calibrate_population(valid, cfg.economy).report()
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "compare": _cmd_compare, "synth": _cmd_synth,
            "calibrate": _cmd_calibrate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, SchemaError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RunError, SimulationError, CalibrationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
