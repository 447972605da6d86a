"""Command-line entry point.

    costsel simulate --config paper.json --out results/ [--threads N] [--seed S] [--bins B]
    costsel criteria-demo --gain 0.2 --cost 10 --criterion bcr

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .criteria import criterion_from_name, score
from .errors import ConfigError, CostselError, ValidationError
from .experiment import SettingFailure, run_grid
from .report import emit_distribution_data, emit_manifest, emit_summary_csv, parse_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

log = logging.getLogger("costsel")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="costsel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulation grid and write CSV results")
    sim.add_argument("--config", required=True, type=Path, help="JSON grid configuration")
    sim.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")
    sim.add_argument("--threads", type=_positive_int, default=1)
    sim.add_argument("--seed", type=_u64, default=None, help="override master_seed")
    sim.add_argument("--bins", type=int, default=None, help="histogram bins per panel (default 60)")
    sim.add_argument("-v", "--verbose", action="store_true")

    demo = sub.add_parser("criteria-demo", help="score a single gain/cost pair")
    demo.add_argument("--gain", type=float, required=True)
    demo.add_argument("--cost", type=float, required=True)
    demo.add_argument("--criterion", required=True, help="plain, bcr, adapted-bcr or weighted-sum")
    group = demo.add_mutually_exclusive_group()
    group.add_argument("--gamma", type=float)
    group.add_argument("--lambda", dest="lam", type=float)
    return parser


def _simulate(args) -> int:
    try:
        cfg = parse_config(args.config, seed=args.seed, bins=args.bins)
    except ValidationError as exc:
        print(f"error: invalid config {args.config}:", file=sys.stderr)
        for problem in exc.violations:
            print(f"  - {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    log.info("running %d settings on %d thread(s)", len(cfg.settings), args.threads)
    results = run_grid(cfg.settings, threads=args.threads)
    failures = [r for r in results if isinstance(r, SettingFailure)]
    summaries = [r for r in results if not isinstance(r, SettingFailure)]

    try:
        args.out.mkdir(parents=True, exist_ok=True)
        if summaries:
            emit_summary_csv(summaries, args.out / "summary.csv")
            emit_distribution_data(summaries, args.out, bins=cfg.bins)
        emit_manifest(cfg.manifest, cfg.resolved, args.out / "manifest.json")
    except OSError as exc:
        print(f"error: cannot write results to {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO

    m = cfg.manifest
    print(f"costsel {m.tool_version}  config {m.config_digest[:16]}  seed {m.master_seed}")
    print(f"{m.setting_count} settings, {len(failures)} failed  ->  {args.out}")
    for f in failures:
        print(f"error: setting {f.setting} failed at replicate {f.replicate_id}: {f.message}", file=sys.stderr)
    return EXIT_NUMERICAL if failures else EXIT_OK


def _criteria_demo(args) -> int:
    try:
        criterion = criterion_from_name(args.criterion, gamma=args.gamma, lam=args.lam)
        print(repr(score(criterion, args.gain, args.cost)))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "simulate":
            return _simulate(args)
        return _criteria_demo(args)
    except CostselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
