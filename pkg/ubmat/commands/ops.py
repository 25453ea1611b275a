"""``ubmat ops``: coordinate operations on UB matrices."""

import argparse
import math

from ubmat.commands.common import (
    add_output_flags,
    add_partition_flag,
    add_tolerance_flag,
    emit,
    format_coordinates,
    format_row,
    load_matrices,
    partition_from_args,
    tolerances_from_args,
)
from ubmat.core.errors import InputFormatError
from ubmat.repo import dump_json, format_dense_csv, read_dense, write_or_print
from ubmat.repo.files import atomic_write_text
from ubmat.schema.coordinates import (
    CanonicalFormReport,
    DeterminantReport,
    EigenvalueReport,
    PositiveDefiniteReport,
    UBCoordinates,
)
from ubmat.service.ub_matrix import (
    positive_definite_diagnostics,
    ub_add,
    ub_canonical_form,
    ub_compress,
    ub_correlation_coordinates,
    ub_eigenvalues,
    ub_expand,
    ub_inverse,
    ub_is_positive_definite,
    ub_multiply,
    ub_power,
    ub_precision_coordinates,
    ub_slogdet,
    ub_subtract,
)


def _single(args: argparse.Namespace):
    matrices = load_matrices(args)
    if len(matrices) != 1:
        raise InputFormatError(f"'{args.op}' takes exactly one matrix (--coords or --dense), got {len(matrices)}")
    return matrices[0]


def _pair(args: argparse.Namespace):
    matrices = load_matrices(args)
    if len(matrices) != 2:
        raise InputFormatError(f"'{args.op}' takes exactly two matrices, got {len(matrices)}")
    return matrices


def _emit_coordinates(args, x, title: str) -> None:
    emit(args, UBCoordinates.from_ub(x), format_coordinates(x, title))


def cmd_det(args) -> int:
    x = _single(args)
    sign, logabs = ub_slogdet(x)
    determinant = 0.0 if sign == 0 else sign * math.exp(logabs)
    report = DeterminantReport(
        partition=list(x.partition.sizes),
        determinant=determinant,
        sign=sign,
        log_abs_determinant=None if sign == 0 else logabs
    )
    emit(args, report, f"determinant {determinant:.12g}\n")
    return 0


def cmd_inv(args) -> int:
    _emit_coordinates(args, ub_inverse(_single(args), tolerances_from_args(args)), "inverse")
    return 0


def cmd_eig(args) -> int:
    x = _single(args)
    pairs = ub_eigenvalues(x)
    report = EigenvalueReport.from_pairs(x.partition, pairs)
    human = "".join(f"{value:>16.10g}  x{mult}\n" for value, mult in pairs)
    human += f"total multiplicity {report.total_multiplicity}\n"
    emit(args, report, human)
    return 0


def cmd_power(args) -> int:
    _emit_coordinates(args, ub_power(_single(args), args.exponent), f"power {args.exponent}")
    return 0


def cmd_canon(args) -> int:
    x = _single(args)
    form = ub_canonical_form(x, tolerances_from_args(args))
    report = CanonicalFormReport.from_form(x.partition, form)
    human = format_row("diagonal", form.diagonal)
    human += format_row("Delta eig", form.delta_eigenvalues)
    if form.degenerate:
        human += "note        Delta has repeated eigenvalues; eigenvectors are one valid basis\n"
    emit(args, report, human)
    return 0


def cmd_corr(args) -> int:
    _emit_coordinates(args, ub_correlation_coordinates(_single(args)), "correlation")
    return 0


def cmd_precision(args) -> int:
    _emit_coordinates(args, ub_precision_coordinates(_single(args), tolerances_from_args(args)), "precision")
    return 0


def cmd_expand(args) -> int:
    dense = ub_expand(_single(args))
    if args.json:
        write_or_print(dump_json({"matrix": dense.tolist()}), args.output)
    elif args.output:
        atomic_write_text(args.output, format_dense_csv(dense))
    else:
        print(format_dense_csv(dense), end="")
    return 0


def cmd_compress(args) -> int:
    partition = partition_from_args(args)
    if partition is None or not args.dense or len(args.dense) != 1 or args.coords:
        raise InputFormatError("'compress' takes one --dense file and --partition")
    x = ub_compress(read_dense(args.dense[0]), partition, tolerances_from_args(args))
    _emit_coordinates(args, x, "coordinates")
    return 0


def cmd_pd(args) -> int:
    x = _single(args)
    positive = ub_is_positive_definite(x, tolerances_from_args(args))
    min_a, min_delta = positive_definite_diagnostics(x)
    report = PositiveDefiniteReport(
        partition=list(x.partition.sizes),
        positive_definite=positive,
        min_a=min_a,
        min_delta_eigenvalue=min_delta
    )
    human = f"positive definite: {'yes' if positive else 'no'} (min a {min_a:.6g}, min Delta eig {min_delta:.6g})\n"
    emit(args, report, human)
    return 0


def cmd_binary(args) -> int:
    x, y = _pair(args)
    if args.op == "add":
        result = ub_add(x, y)
    elif args.op == "sub":
        result = ub_subtract(x, y)
    else:
        result = ub_multiply(x, y, tolerances_from_args(args))
    _emit_coordinates(args, result, args.op)
    return 0


HANDLERS = {
    "det": cmd_det,
    "inv": cmd_inv,
    "eig": cmd_eig,
    "power": cmd_power,
    "canon": cmd_canon,
    "corr": cmd_corr,
    "precision": cmd_precision,
    "expand": cmd_expand,
    "compress": cmd_compress,
    "pd": cmd_pd,
    "add": cmd_binary,
    "sub": cmd_binary,
    "mul": cmd_binary,
}


def cmd_ops(args) -> int:
    return HANDLERS[args.op](args)


def register(subparsers) -> None:
    parser = subparsers.add_parser("ops", help="coordinate operations on UB matrices")
    parser.add_argument("op", choices=list(HANDLERS), help="operation")
    parser.add_argument("--coords", action="append", metavar="JSON", help="coordinate file (repeat for add/sub/mul)")
    parser.add_argument("--dense", action="append", metavar="CSV", help="dense matrix file, compressed on read")
    parser.add_argument("--exponent", type=int, default=2, help="exponent for 'power'")
    add_partition_flag(parser)
    add_tolerance_flag(parser)
    add_output_flags(parser)
    parser.set_defaults(handler=cmd_ops)
