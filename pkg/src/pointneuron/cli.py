"""Command line entry point.

Subcommands: simulate | train | evaluate | gradcheck | sweep.
Exit codes: 0 success, 1 validation error, 2 numeric failure.
"""

import argparse
import sys
from pathlib import Path

from .gradcheck import run_gradcheck
from .runner import ConfigError, load_config, run_evaluate, run_simulate, run_sweep, run_train
from .scenario import load_scenario

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2


def _add_common(p):
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--seed", type=int, help="master seed (overrides config)")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--frequencies", type=float, nargs="+", help="frequency list override [Hz]")
    p.add_argument("--methods", nargs="+", choices=["point_neuron", "harmonics"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pointneuron",
                                     description="Sound field reconstruction experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate observations and ground truth")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="master seed")

    for name in ("train", "evaluate", "sweep"):
        _add_common(sub.add_parser(name, help=f"run the {name} stage"))

    p = sub.add_parser("gradcheck", help="finite-difference gradient verification")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    return parser


def _config_from_args(args):
    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = Path(args.out)
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.frequencies is not None:
        overrides["frequencies"] = tuple(args.frequencies)
    if args.methods is not None:
        overrides["methods"] = tuple(args.methods)
    return load_config(args.config, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            scenario = load_scenario(args.scenario)
            run_simulate(scenario, args.out, args.seed)
        elif args.command == "train":
            results = run_train(_config_from_args(args))
            failed = [r for r in results if r["status"] != "ok"]
            for r in failed:
                print(f"train failed at {r['freq']} Hz seed {r['seed']}: {r['status']}",
                      file=sys.stderr)
            if failed and len(failed) == len(results):
                return EXIT_NUMERIC
        elif args.command == "evaluate":
            run_evaluate(_config_from_args(args))
        elif args.command == "sweep":
            rows = run_sweep(_config_from_args(args))
            failed = [r for r in rows if r["status"] != "ok"]
            if failed and len(failed) == len(rows):
                return EXIT_NUMERIC
        elif args.command == "gradcheck":
            report = run_gradcheck(trials=args.trials, seed=args.seed)
            for msg in report.messages:
                print(msg)
            print(f"gradcheck: {report.trials} trials, {report.failures} failures, "
                  f"worst weight err {report.worst_weight_err:.3e}, "
                  f"worst bias err {report.worst_bias_err:.3e}")
            if not report.passed:
                return EXIT_NUMERIC
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
