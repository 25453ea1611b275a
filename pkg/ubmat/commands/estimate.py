"""``ubmat estimate``: coordinate estimates from a dataset."""

from ubmat.commands.common import (
    add_output_flags,
    add_partition_flag,
    add_tolerance_flag,
    emit,
    format_coordinates,
    partition_from_args,
    tolerances_from_args,
)
from ubmat.core.errors import InputFormatError
from ubmat.repo import read_dataset
from ubmat.schema.coordinates import EstimateReport
from ubmat.service.estimation import estimate_coordinates, estimate_precision, sample_moments


def add_data_flags(parser) -> None:
    parser.add_argument("--data", required=True, metavar="CSV", help="observations, one row per line")
    parser.add_argument("--header", action="store_true", help="the data file starts with a header row")
    parser.add_argument("--labels", metavar="CSV", help="single-column file of group labels")
    parser.add_argument("--label-column", metavar="NAME", help="header name or 1-based index of the label column")
    parser.add_argument("--allow-small-n", action="store_true", default=None,
                        help="estimate even when n <= K + K(K+1)/2")
    add_partition_flag(parser, required=True)


def load_dataset(args):
    partition = partition_from_args(args)
    if partition is None:
        raise InputFormatError("--partition is required")
    return read_dataset(args.data, partition, args.header, args.labels, args.label_column)


def cmd_estimate(args) -> int:
    data = load_dataset(args)
    moments = sample_moments(data)
    estimate = estimate_coordinates(moments, data.partition, args.allow_small_n)
    precision = estimate_precision(estimate, tolerances_from_args(args)) if args.precision else None

    report = EstimateReport.from_estimate(moments, estimate, precision)
    human = f"n {moments.n} (divisor {moments.divisor}, groups {len(moments.group_sizes)})\n"
    human += format_coordinates(estimate, "estimate")
    if precision is not None:
        human += format_coordinates(precision, "precision")
    emit(args, report, human)
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("estimate", help="estimate UB coordinates from data")
    add_data_flags(parser)
    parser.add_argument("--precision", action="store_true", help="also report the plug-in precision")
    add_tolerance_flag(parser)
    add_output_flags(parser)
    parser.set_defaults(handler=cmd_estimate)
