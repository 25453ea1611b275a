"""``ubmat bench``: coordinate versus dense timings."""

from ubmat.commands.common import add_output_flags, emit
from ubmat.core.config import get_settings
from ubmat.core.errors import InputFormatError
from ubmat.schema.bench import BenchRecord, BenchReport
from ubmat.service.benchmark import OPERATIONS, PRESETS, resolve_grid, run_benchmark


def _parse_grid(values):
    pairs = []
    for value in values or []:
        try:
            K, p = (int(part) for part in value.split(":"))
        except ValueError:
            raise InputFormatError(f"grid entry {value!r} must look like K:p, e.g. 8:1024")
        pairs.append((K, p))
    return pairs


def cmd_bench(args) -> int:
    settings = get_settings()
    presets = args.preset or []
    pairs = _parse_grid(args.grid)
    if not presets and not pairs:
        presets = list(PRESETS)
    ops = [op.strip() for op in args.ops.split(",") if op.strip()]

    timings = run_benchmark(resolve_grid(presets, pairs), ops, args.repeats, args.seed, dense=not args.no_dense)
    report = BenchReport(
        repeats=args.repeats or settings.bench_repeats,
        seed=settings.seed if args.seed is None else args.seed,
        records=[BenchRecord.from_timing(t) for t in timings]
    )

    lines = [f"{'op':<6}{'K':>4}{'p':>7}{'coordinate s':>15}{'dense s':>13}{'speedup':>12}\n"]
    for r in report.records:
        dense = f"{r.dense_seconds:.3e}" if r.dense_seconds is not None else "skipped"
        speedup = f"{r.speedup:.0f}x" if r.speedup is not None else "-"
        lines.append(f"{r.op:<6}{r.K:>4}{r.p:>7}{r.coordinate_seconds:>15.3e}{dense:>13}{speedup:>12}\n")
    emit(args, report, "".join(lines))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="time coordinate operations against the dense path")
    parser.add_argument("--preset", action="append", choices=sorted(PRESETS), help="named (K, p) profile")
    parser.add_argument("--grid", action="append", metavar="K:p", help="extra (K, p) pair")
    parser.add_argument("--ops", default=",".join(OPERATIONS), help=f"comma list from {', '.join(OPERATIONS)}")
    parser.add_argument("--repeats", type=int, help="timing repeats (median reported)")
    parser.add_argument("--seed", type=int, help="seed for the random instances")
    parser.add_argument("--no-dense", action="store_true", help="time the coordinate path only")
    add_output_flags(parser)
    parser.set_defaults(handler=cmd_bench)
