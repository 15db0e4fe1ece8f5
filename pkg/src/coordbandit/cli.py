"""Command line entry point: ``coordbandit simulate | sweep | check-geometry``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import checks
from .harness import (
    ConfigError, StrategySpec, SweepConfig, csv_text, fit_exponent, monte_carlo,
    summary_path, summary_text,
)
from .instances import parse_instance_spec

EXIT_OK, EXIT_CONFIG, EXIT_PROPERTY = 0, 1, 2

log = logging.getLogger("coordbandit")


def _T_value(text: str) -> int:
    """Accepts ``65536`` or ``2^16``."""
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    return int(text)


def _add_run_options(p: argparse.ArgumentParser, multi_T: bool):
    p.add_argument("--strategy", required=True,
                   help="partition, partition-dynamic, bandit-partition, collision or explore-exploit")
    p.add_argument("--model", default=None, help="bandit or full-info (default: the strategy's own)")
    if multi_T:
        p.add_argument("--T", type=_T_value, nargs="+", required=True, help="horizon grid, e.g. 2^12 2^14")
    else:
        p.add_argument("--T", type=_T_value, required=True, help="horizon, e.g. 65536 or 2^16")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--instance", default="random", help="random | fixed:p1,p2,p3 | hard:eps")
    p.add_argument("--w-scale", type=float, default=1.0, help="multiplier on the padding constant")
    p.add_argument("--theta-grid", action="store_true", help="round the bandit interface to multiples of 1/T")
    p.add_argument("--c-init", type=float, default=None)
    p.add_argument("--c-fix", type=float, default=None)
    p.add_argument("--c-gap", type=float, default=None)
    p.add_argument("--c-window", type=float, default=None)
    p.add_argument("--c-scale", type=float, default=1.0, help="multiplier on all collision constants")
    p.add_argument("--a", type=float, default=0.2, help="threshold exponent of explore-exploit")
    p.add_argument("--b", type=float, default=0.8, help="exploration exponent of explore-exploit")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="CSV path; a summary and an SVG figure are written next to it")
    p.add_argument("--no-figure", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coordbandit",
                                     description="Two-player three-armed bandit coordination simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_options(sub.add_parser("simulate", help="run one (strategy, T) cell"), multi_T=False)
    _add_run_options(sub.add_parser("sweep", help="run a T grid and fit the regret exponent"), multi_T=True)
    geo = sub.add_parser("check-geometry", help="run the geometry and partition property suites")
    geo.add_argument("--seed", type=int, default=0)
    geo.add_argument("--scale", type=float, default=1.0, help="fraction of the default case counts")
    return parser


def _sweep_from_args(args, grid) -> SweepConfig:
    spec = StrategySpec(
        name=args.strategy, model=args.model, w_scale=args.w_scale, theta_grid=args.theta_grid,
        c_init=args.c_init, c_fix=args.c_fix, c_gap=args.c_gap, c_window=args.c_window,
        c_scale=args.c_scale, a=args.a, b=args.b,
    )
    try:
        instance = parse_instance_spec(args.instance)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return SweepConfig(spec=spec, instance=instance, T_grid=tuple(grid), episodes=args.episodes,
                       seed=args.seed, workers=args.workers, out=args.out)


def _run(args, grid, fit: bool) -> int:
    sweep = _sweep_from_args(args, grid)
    results, rows = monte_carlo(sweep)
    exponent = None
    if fit and len(rows) >= 3 and all(r.mean_regret > 0 for r in rows):
        exponent = fit_exponent([(r.T, r.mean_regret) for r in rows])
    summary = summary_text(rows, exponent)
    if args.out:
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        with open(args.out, "w", newline="") as fh:
            fh.write(csv_text(results))
        with open(summary_path(args.out, ".summary.csv"), "w") as fh:
            fh.write(summary)
        if not args.no_figure:
            from .plotting import emit_svg_summary
            emit_svg_summary(results, summary_path(args.out, ".svg"),
                             title=f"{sweep.spec.name} ({sweep.spec.model.value})")
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(csv_text(results))
    sys.stdout.write(summary)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "check-geometry":
            results = checks.run_all(seed=args.seed, scale=args.scale)
            for r in results:
                print(r.line())
            passed = sum(r.ok for r in results)
            print(f"{passed}/{len(results)} suites passed")
            return EXIT_OK if passed == len(results) else EXIT_PROPERTY
        if args.command == "simulate":
            return _run(args, [args.T], fit=False)
        return _run(args, args.T, fit=True)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
