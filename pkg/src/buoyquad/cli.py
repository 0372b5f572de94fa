"""Command-line surface.

Subcommands: ``simulate`` (one scenario to a trace CSV), ``mc`` (seeded
Monte Carlo campaign to a summary CSV), ``faultscan`` (offline detector
replay over a logged trace), ``lifetime`` (endurance query), and
``size-balloon`` (buoyancy sizing).  Exit codes: 0 success, 1 usage
error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .energy import BalloonSpec, BatteryModel, lifetime_minutes, size_balloon
from .errors import BuoyquadError
from .harness import (
    MonteCarloSpec,
    fault_scan,
    run_montecarlo,
    run_scenario,
    write_summary_csv,
    write_trace_csv,
)
from .scenario import load_scenario

USAGE_EXIT = 1
RUNTIME_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="buoyquad",
                     description="Buoyant-quadrotor flight simulator")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run one scenario, write the trace CSV")
    sim.add_argument("scenario", help="scenario file (key = value text)")
    sim.add_argument("-o", "--output", required=True, help="trace CSV path")

    mc = sub.add_parser("mc", help="Monte Carlo campaign over seeds")
    mc.add_argument("scenario")
    mc.add_argument("--runs", type=int, required=True)
    mc.add_argument("--seed", type=int, required=True,
                    help="base seed; run i uses seed + i")
    mc.add_argument("-o", "--output", required=True, help="summary CSV path")

    scan = sub.add_parser("faultscan", help="replay the fault detector offline")
    scan.add_argument("trace", help="trace CSV produced by simulate")
    scan.add_argument("--config", required=True,
                      help="scenario file providing detector thresholds")

    life = sub.add_parser("lifetime", help="endurance for a duty fraction")
    life.add_argument("--duty", type=float, required=True)
    life.add_argument("--heading", choices=("on", "off"), required=True)

    size = sub.add_parser("size-balloon", help="neutral-buoyancy balloon size")
    size.add_argument("--payload-g", type=float, required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            scenario = load_scenario(args.scenario)
            result = run_scenario(scenario)
            write_trace_csv(result.records, args.output)
            print(f"{len(result.records)} records -> {args.output}")
            if result.metric_value is not None:
                print(f"{result.metric_name} = {result.metric_value:.6g}")
        elif args.command == "mc":
            if args.runs < 1:
                parser.error("--runs must be >= 1")
            with open(args.scenario, encoding="utf-8") as fh:
                base_text = fh.read()
            spec = MonteCarloSpec(
                base_text=base_text,
                seeds=tuple(args.seed + i for i in range(args.runs)),
            )
            summary = run_montecarlo(spec)
            write_summary_csv(summary, args.output)
            ok = summary.values
            print(f"{len(summary.outcomes)} runs ({len(ok)} ok) -> {args.output}")
            if ok:
                print(f"{summary.metric_name}: p50={summary.percentile(50):.4g} "
                      f"p90={summary.percentile(90):.4g}")
        elif args.command == "faultscan":
            scenario = load_scenario(args.config)
            detections = fault_scan(args.trace, scenario)
            if not detections:
                print("no faults detected")
            for t, rotor in detections:
                print(f"t={t:.3f} rotor={rotor}")
        elif args.command == "lifetime":
            minutes = lifetime_minutes(args.duty, args.heading == "on", BatteryModel())
            print(f"{minutes:.1f} minutes")
        elif args.command == "size-balloon":
            volume_l, diameter = size_balloon(args.payload_g / 1000.0, BalloonSpec())
            print(f"volume = {volume_l:.1f} L, diameter = {diameter:.3f} m")
    except BuoyquadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
