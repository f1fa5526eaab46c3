"""Command line front end: calibrate, bench, stream, and feed subcommands."""

from __future__ import annotations

import argparse
import sys

from .bench import DESK_GRID, FULL_GRID, BenchConfig, emit_csv, run_grid
from .costmodel import UnitCosts, calibrate_unit_costs
from .stream import IngestReport, StreamConfig, grid_search, ingest, serve_feed


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _cmd_calibrate(args: argparse.Namespace) -> int:
    costs = calibrate_unit_costs(args.trials, args.batch)
    print(f"u_add={costs.u_add:.6g}")
    print(f"u_mul={costs.u_mul:.6g}")
    return 0


def _resolve_costs(args: argparse.Namespace) -> UnitCosts | None:
    if args.u_add is not None or args.u_mul is not None:
        if args.u_add is None or args.u_mul is None:
            raise ValueError("--u-add and --u-mul must be given together")
        return UnitCosts(args.u_add, args.u_mul)
    return None


def _cmd_bench(args: argparse.Namespace) -> int:
    default_grid = FULL_GRID if args.full_scale else DESK_GRID
    budget = 50_000_000 if args.full_scale else 2_000_000
    config = BenchConfig(
        n1_values=tuple(args.n1 or default_grid),
        n2_values=tuple(args.n2 or default_grid),
        trials=args.trials,
        seed=args.seed,
        distribution=args.distribution,
        max_cell_elements=budget,
    )
    records = run_grid(config, costs=_resolve_costs(args))
    if args.out:
        emit_csv(records, args.out)
        print(f"wrote {len(records)} records to {args.out}")
    else:
        emit_csv(records, sys.stdout)
    return 0


def _print_report(report: IngestReport) -> None:
    summary = report.running_summary
    print(f"records read:       {report.records_read}")
    print(f"records missing:    {report.records_missing}")
    print(f"batches merged:     {report.batches}")
    print(f"count:              {summary.n}")
    if summary.n >= 1:
        print(f"mean:               {summary.mean:.9g}")
        print(f"population var:     {summary.population_variance():.9g}")
    if summary.n >= 2:
        print(f"sample var:         {summary.sample_variance():.9g}")
    print(f"merge seconds:      {report.t_pka_total:.6g}")
    print(f"recompute seconds:  {report.t_direct_total:.6g}")
    print(f"max relative gap:   {report.max_rel_deviation:.3g}")
    print(f"truncated:          {'yes' if report.truncated else 'no'}")


def _cmd_stream(args: argparse.Namespace) -> int:
    if bool(args.file) == bool(args.listen):
        raise ValueError("exactly one of --file or --listen is required")
    config = StreamConfig(
        source=args.file or args.listen,
        column=args.column,
        delimiter=args.delimiter,
        missing_token=args.missing,
        batch_size=args.batch,
        mode=args.mode,
        source_kind="file" if args.file else "listen",
        header=args.header,
        on_error=args.on_error,
    )
    if args.grid_n1 or args.grid_n2:
        if not (args.grid_n1 and args.grid_n2):
            raise ValueError("--grid-n1 and --grid-n2 must be given together")
        records = grid_search(config, batch_sizes=args.grid_n2, prior_sizes=args.grid_n1)
        if not records:
            print("no grid cells could run; source too short", file=sys.stderr)
            return 1
        emit_csv(records, args.out if args.out else sys.stdout)
        if args.out:
            print(f"wrote {len(records)} records to {args.out}")
        return 0
    report = ingest(config)
    _print_report(report)
    if config.mode == "both" and report.max_rel_deviation > 1e-9:
        print(f"error: merge path deviates from recompute path by {report.max_rel_deviation:.3g}", file=sys.stderr)
        return 1
    return 0


def _cmd_feed(args: argparse.Namespace) -> int:
    sent = serve_feed(args.file, args.connect, rate=args.rate)
    print(f"sent {sent} records to {args.connect}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mergestats",
        description="Mergeable streaming statistics: benchmark, calibrate, and stream.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="measure per-operation add/multiply costs")
    cal.add_argument("--trials", type=int, default=7)
    cal.add_argument("--batch", type=int, default=100_000)
    cal.set_defaults(func=_cmd_calibrate)

    bench = sub.add_parser("bench", help="time direct recomputation vs summary merging over a grid")
    bench.add_argument("--n1", type=_int_list, help="comma-separated prior sizes")
    bench.add_argument("--n2", type=_int_list, help="comma-separated batch sizes")
    bench.add_argument("--trials", type=int, default=30)
    bench.add_argument("--seed", type=int, default=8086)
    bench.add_argument("--distribution", choices=("uniform", "normal"), default="uniform")
    bench.add_argument("--out", help="CSV destination (default: stdout)")
    bench.add_argument("--full-scale", action="store_true", help="use the large default grid and budget")
    bench.add_argument("--u-add", type=float, help="skip calibration and use this add cost")
    bench.add_argument("--u-mul", type=float, help="skip calibration and use this multiply cost")
    bench.set_defaults(func=_cmd_bench)

    stream = sub.add_parser("stream", help="ingest a record stream and maintain a running summary")
    stream.add_argument("--file", help="read records from this CSV file")
    stream.add_argument("--listen", help="accept one feeder connection on this host:port")
    stream.add_argument("--column", required=True, help="numeric column to aggregate")
    stream.add_argument("--delimiter", default=";")
    stream.add_argument("--missing", default="?", help="token treated as a missing value")
    stream.add_argument("--batch", type=int, default=200, help="records per merge chunk")
    stream.add_argument("--mode", choices=("pka", "direct", "both"), default="pka")
    stream.add_argument("--header", help="field layout for headerless socket streams")
    stream.add_argument("--on-error", choices=("abort", "skip"), default="abort")
    stream.add_argument("--grid-n1", type=_int_list, help="prior sizes for grid search")
    stream.add_argument("--grid-n2", type=_int_list, help="batch sizes for grid search")
    stream.add_argument("--out", help="CSV destination for grid search results")
    stream.set_defaults(func=_cmd_stream)

    feed = sub.add_parser("feed", help="replay a CSV file over a socket")
    feed.add_argument("--file", required=True)
    feed.add_argument("--connect", required=True, help="consumer host:port")
    feed.add_argument("--rate", type=float, help="records per second (default: unlimited)")
    feed.set_defaults(func=_cmd_feed)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
