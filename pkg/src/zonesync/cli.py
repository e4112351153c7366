"""Command-line entry point.

Three subcommands: ``run`` solves one scenario and prints a metrics CSV
row, ``sweep`` replays a scenario over a twin-count or sigma axis with
both methods, ``dump-partition`` writes the cell-by-cell region map.
Exit codes: 0 success, 1 configuration problems, 2 infeasibility under a
strict policy.
"""

from __future__ import annotations

import argparse
import csv
import sys
from contextlib import nullcontext

from .errors import ComputeExhausted, ConfigError, InfeasibleDeadline, ZoneSyncError
from .harness import dump_partition, run_scenario, sweep_dts, sweep_sigma, write_records
from .scenario import apply_overrides, load_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zonesync",
        description="Partition a sensed zone across edge servers and allocate compute.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario JSON (path or bundled preset name)")
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="PATH=VALUE", help="dotted-path config override, repeatable")
        p.add_argument("--out", default=None, help="write CSV here instead of stdout")

    run = sub.add_parser("run", help="solve one scenario and print its metrics row")
    common(run)
    run.add_argument("--method", choices=("ot", "snr"), default=None)

    sweep = sub.add_parser("sweep", help="paired sweep over twin count or sensing spread")
    common(sweep)
    sweep.add_argument("--axis", choices=("dts", "sigma"), required=True)
    sweep.add_argument("--values", required=True, help="comma-separated axis values")

    dump = sub.add_parser("dump-partition", help="write the cell-by-cell region map")
    common(dump)
    dump.add_argument("--method", choices=("ot", "snr"), default=None)

    return parser


def _load(args) -> dict:
    cfg = load_config(args.config)
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
        overrides.append(f"dts.placement_seed={args.seed}")
    return apply_overrides(cfg, overrides)


def _parse_values(text: str) -> list[float]:
    values = [v.strip() for v in text.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values must list at least one number")
    try:
        return [float(v) for v in values]
    except ValueError as exc:
        raise ConfigError(f"--values must be numeric: {exc}") from exc


def _open_out(args):
    return open(args.out, "w", newline="") if args.out else nullcontext(sys.stdout)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "run":
            if args.method:
                cfg["method"] = args.method
            record = run_scenario(cfg)
            with _open_out(args) as out:
                write_records([record], out)
        elif args.command == "sweep":
            values = _parse_values(args.values)
            if args.axis == "dts":
                records = sweep_dts(cfg, [int(v) for v in values])
            else:
                records = sweep_sigma(cfg, values)
            with _open_out(args) as out:
                write_records(records, out)
        else:
            rows = dump_partition(cfg, args.method)
            with _open_out(args) as out:
                csv.writer(out).writerows(rows)
    except ConfigError as exc:
        print(f"zonesync: config error: {exc}", file=sys.stderr)
        return 1
    except (InfeasibleDeadline, ComputeExhausted) as exc:
        print(f"zonesync: infeasible: {exc}", file=sys.stderr)
        return 2
    except ZoneSyncError as exc:
        print(f"zonesync: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
