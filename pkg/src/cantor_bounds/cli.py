"""Command-line driver: ``cantor-bounds upper|lower|naive|report``.

Exit codes: 1 argument error, 2 enumeration budget exceeded, 3 replay
verification failed, 4 report requested on an empty cache.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .lattice import DEFAULT_MAX_ENUM, EnumerationBudgetExceeded, restricted_count
from .lower import (
    DEFAULT_MAX_VERTICES,
    SEED_FIVE_NINTHS,
    SEED_ONE_THIRD,
    LowerBoundChain,
    ReplayError,
    refine_lower_bound,
    replay_d3,
)
from .numerics import dimension, naive_upper
from .records import RunRecord, cache_dir, load_records, write_record
from .upper import max_depth, upper_bound

log = logging.getLogger("cantor_bounds")

EXIT_ARGS, EXIT_BUDGET, EXIT_REPLAY, EXIT_EMPTY = 1, 2, 3, 4
AUTO_UPPER_ENUM = 2**24
SEEDS = {"5/9": SEED_FIVE_NINTHS, "1/3": SEED_ONE_THIRD}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _fmt_q(q: Fraction) -> str:
    return str(Fraction(q))


def _finish(record: RunRecord, args, started: float) -> RunRecord:
    if args.timing:
        record.wall_time_ms = int((time.perf_counter() - started) * 1000)
    if not args.no_cache:
        path = write_record(record, args.cache_dir)
        log.info("wrote %s", path)
    return record


def cmd_upper(args) -> RunRecord:
    started = time.perf_counter()
    k = max_depth(args.dim, args.max_enum) if args.depth == "max" else int(args.depth)
    if k < 1:
        raise SystemExit(EXIT_ARGS)
    res = upper_bound(args.dim, k, method=args.method, threads=args.threads, max_enum=args.max_enum)
    w = res.witness
    print(f"d={args.dim} k={k} upper={res.value!r}")
    print(f"  diameter^2={_fmt_q(w['diameter_sq'])} radius^2={_fmt_q(w['radius_sq'])} "
          f"N={w['covered']} mu_low={_fmt_q(w['mu_low'])}")
    record = RunRecord(
        command="upper",
        d=args.dim,
        k=k,
        result=res,
        flags={"method": args.method, "max_enum": args.max_enum},
        enumeration_count=restricted_count(args.dim, k),
    )
    return _finish(record, args, started)


def _best_cached_upper(d: int, directory) -> float | None:
    values = [r.result.value for r in load_records(directory) if r.command == "upper" and r.d == d]
    return min(values) if values else None


def _resolve_upper(args) -> float:
    if args.upper_bound != "auto":
        return float(args.upper_bound)
    cached = _best_cached_upper(args.dim, args.cache_dir)
    if cached is not None:
        return cached
    k = max_depth(args.dim, min(args.max_enum, AUTO_UPPER_ENUM))
    log.info("no cached upper bound for d=%d; computing at depth %d", args.dim, k)
    return upper_bound(args.dim, k, threads=args.threads, max_enum=args.max_enum).value


def _print_chain(chain: LowerBoundChain, out=None):
    out = out or sys.stdout
    print(f"d={chain.d} k={chain.k} H_d={chain.H_used!r} seed |B|^2 >= {_fmt_q(chain.seed)}", file=out)
    print(f"{'step':>4}  {'threshold':>10}  {'cap':>8}  {'mu_min':>20}  classes", file=out)
    for i, st in enumerate(chain.steps, 1):
        sizes = " ".join(f"{''.join(map(str, c))}:{m}" for c, m in st.matching_sizes.items())
        print(f"{i:>4}  {_fmt_q(st.threshold):>10}  {_fmt_q(st.measure_cap):>8}  {st.mu_min!r:>20}  {sizes}", file=out)
    for name, ok, detail in chain.checks:
        print(f"  [{'ok' if ok else 'FAIL'}] {name} {detail}".rstrip(), file=out)
    for note in chain.notes:
        print(f"  note: {note}", file=out)


def cmd_lower(args) -> RunRecord:
    started = time.perf_counter()
    H = _resolve_upper(args)
    if args.replay:
        if args.dim != 3 or args.depth != 2:
            print("--replay is only defined for --dim 3 --depth 2", file=sys.stderr)
            raise SystemExit(EXIT_ARGS)
        try:
            chain = replay_d3(H, max_vertices=args.max_vertices)
        except ReplayError as err:
            if err.chain is not None:
                _print_chain(err.chain)
            print(f"verification failed: {err}", file=sys.stderr)
            raise SystemExit(EXIT_REPLAY)
    else:
        chain = refine_lower_bound(args.dim, args.depth, H, seed=SEEDS[args.seed], max_vertices=args.max_vertices)
    _print_chain(chain)
    print(f"d={chain.d} k={chain.k} lower={chain.final_value!r} (|B|^2 >= {_fmt_q(chain.final_L2)})")
    record = RunRecord(
        command="lower",
        d=args.dim,
        k=args.depth,
        result=chain,
        flags={"upper_bound": args.upper_bound, "seed": args.seed, "replay": args.replay},
        enumeration_count=sum(len(st.matching_sizes) for st in chain.steps),
    )
    return _finish(record, args, started)


def naive_rows(d_max: int) -> list[dict]:
    return [{"d": d, "s_d": dimension(d), "naive": naive_upper(d)} for d in range(1, d_max + 1)]


def cmd_naive(args) -> RunRecord:
    started = time.perf_counter()
    rows = naive_rows(args.max_dim)
    print(f"{'d':>3}  {'s_d':>20}  {'naive':>20}")
    for r in rows:
        print(f"{r['d']:>3}  {r['s_d']!r:>20}  {r['naive']!r:>20}")
    record = RunRecord(command="naive", d=args.max_dim, k=0, result=rows)
    return _finish(record, args, started)


REPORT_FIELDS = ["d", "s_d", "naive", "upper", "lower", "depth_upper", "depth_lower"]


def report_rows(records: list[RunRecord]) -> list[dict]:
    best_upper: dict[int, tuple[float, int]] = {}
    best_lower: dict[int, tuple[float, int]] = {}
    dims: set[int] = set()
    for r in records:
        if r.command == "upper":
            v = r.result.value
            if r.d not in best_upper or v < best_upper[r.d][0]:
                best_upper[r.d] = (v, r.k)
            dims.add(r.d)
        elif r.command == "lower":
            v = r.result.final_value
            if r.d not in best_lower or v > best_lower[r.d][0]:
                best_lower[r.d] = (v, r.k)
            dims.add(r.d)
        elif r.command == "naive":
            dims.update(range(1, r.d + 1))
    rows = []
    for d in sorted(dims):
        up, lo = best_upper.get(d), best_lower.get(d)
        rows.append({
            "d": d,
            "s_d": dimension(d),
            "naive": naive_upper(d),
            "upper": up[0] if up else None,
            "lower": lo[0] if lo else None,
            "depth_upper": up[1] if up else None,
            "depth_lower": lo[1] if lo else None,
        })
    return rows


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_FIELDS)
    for row in rows:
        writer.writerow(["" if row[f] is None else repr(row[f]) if isinstance(row[f], float) else row[f]
                         for f in REPORT_FIELDS])
    return buf.getvalue()


def _series_text(rows: list[dict], key: str) -> str:
    return "".join(f"{row['d']} {row[key]!r}\n" for row in rows if row[key] is not None)


def cmd_report(args) -> list[Path]:
    records = load_records(args.cache_dir)
    if not records:
        print(f"no cached runs in {cache_dir(args.cache_dir)}", file=sys.stderr)
        raise SystemExit(EXIT_EMPTY)
    rows = report_rows(records)
    for row in rows:
        if row["lower"] is not None and row["upper"] is not None and row["lower"] > row["upper"]:
            log.warning("d=%d: lower bound %r exceeds upper bound %r", row["d"], row["lower"], row["upper"])
    out = Path(args.out) if args.out else cache_dir(args.cache_dir) / "report"
    out.mkdir(parents=True, exist_ok=True)
    written = []
    formats = args.format or ["csv"]
    if "csv" in formats:
        text = _csv_text(rows)
        (out / "report.csv").write_text(text)
        sys.stdout.write(text)
        written.append(out / "report.csv")
    if "json" in formats:
        (out / "report.json").write_text(json.dumps(rows, indent=2) + "\n")
        written.append(out / "report.json")
    if "plot" in formats:
        for key in ("naive", "upper", "lower"):
            name = f"{key}.dat"
            (out / name).write_text(_series_text(rows, key))
            written.append(out / name)
    for path in written:
        log.info("wrote %s", path)
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cantor-bounds", description=__doc__.splitlines()[0])
    parser.add_argument("--cache-dir", default=None, help="result cache (default $CANTOR_BOUNDS_DIR or ./results)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--threads", type=_positive, default=os.cpu_count() or 1)
        p.add_argument("--max-enum", type=_positive, default=DEFAULT_MAX_ENUM)
        p.add_argument("--no-cache", action="store_true", help="do not write the result cache")
        p.add_argument("--timing", action="store_true", help="store wall time in the cache record")

    p = sub.add_parser("upper", help="upper bound from centred balls")
    p.add_argument("--dim", type=_positive, required=True)
    p.add_argument("--depth", default="max", help="depth k, or 'max' for the largest within --max-enum")
    p.add_argument("--method", choices=["convolve", "enumerate"], default="convolve")
    common(p)
    p.set_defaults(func=cmd_upper)

    p = sub.add_parser("lower", help="lower bound from repulsive pairs")
    p.add_argument("--dim", type=_positive, required=True)
    p.add_argument("--depth", type=_positive, required=True)
    p.add_argument("--upper-bound", default="auto", help="H_d value, or 'auto' to use the cache")
    p.add_argument("--seed", choices=sorted(SEEDS), default="5/9")
    p.add_argument("--replay", action="store_true", help="replay the published d=3 chain")
    p.add_argument("--max-vertices", type=_positive, default=DEFAULT_MAX_VERTICES)
    common(p)
    p.set_defaults(func=cmd_lower)

    p = sub.add_parser("naive", help="naive upper bounds d^(s_d/2)")
    p.add_argument("--max-dim", type=_positive, default=6)
    common(p)
    p.set_defaults(func=cmd_naive)

    p = sub.add_parser("report", help="combined table and plot data from the cache")
    p.add_argument("--format", action="append", choices=["csv", "json", "plot"])
    p.add_argument("--out", default=None, help="output directory (default <cache>/report)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "upper" and args.depth != "max":
        try:
            if int(args.depth) < 1:
                raise ValueError
        except ValueError:
            parser.error(f"--depth must be a positive integer or 'max', got {args.depth!r}")
    if args.command == "lower" and args.upper_bound != "auto":
        try:
            if not float(args.upper_bound) > 0:
                raise ValueError
        except ValueError:
            parser.error(f"--upper-bound must be positive or 'auto', got {args.upper_bound!r}")
    try:
        args.func(args)
    except EnumerationBudgetExceeded as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except SystemExit as err:
        return int(err.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
