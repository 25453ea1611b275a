"""Flags and helpers shared by every subcommand."""

import argparse
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel

from ubmat.core.config import Tolerances, get_settings
from ubmat.core.errors import InputFormatError
from ubmat.repo import dump_json, read_coordinates, read_dense_as_ub, write_or_print
from ubmat.repo.files import atomic_write_text
from ubmat.service.ub_matrix import PartitionVector, UBMatrix


def add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", action="store_true", help="emit machine-readable JSON")
    parser.add_argument("--output", metavar="PATH", help="write the result to PATH (atomic) instead of stdout")


def add_tolerance_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--tolerance", type=float, metavar="RTOL",
        help="override the structure and symmetry tolerances"
    )


def add_partition_flag(parser: argparse.ArgumentParser, required: bool = False) -> None:
    parser.add_argument(
        "--partition", required=required, metavar="SIZES",
        help="block sizes inline (e.g. 2,3,4) or a file holding them"
    )


def add_mc_flags(parser: argparse.ArgumentParser) -> None:
    settings = get_settings()
    parser.add_argument("--alpha", type=float, default=settings.alpha, help="significance level")
    parser.add_argument("--replicates", type=int, default=settings.mc_replicates,
                        help="Monte Carlo replicates for the null law")
    parser.add_argument("--seed", type=int, default=settings.seed, help="random seed")
    parser.add_argument("--workers", type=int, default=settings.workers, help="worker threads")
    parser.add_argument("--method", choices=("mc", "morrison"), default="mc",
                        help="Monte Carlo law or the scaled-F approximation")


def tolerances_from_args(args: argparse.Namespace) -> Tolerances:
    tol = getattr(args, "tolerance", None)
    return Tolerances.from_settings().with_overrides(structure_rtol=tol, symmetry_tol=tol)


def partition_from_args(args: argparse.Namespace) -> Optional[PartitionVector]:
    """Inline sizes, or the first non-empty line of a file holding them."""
    spec = getattr(args, "partition", None)
    if spec is None:
        return None
    candidate = Path(spec)
    if candidate.is_file():
        lines = [line for line in candidate.read_text(encoding="utf-8").splitlines() if line.strip()]
        if not lines:
            raise InputFormatError("partition file is empty", path=str(candidate))
        spec = lines[0].strip()
    return PartitionVector.parse(spec)


def load_matrices(args: argparse.Namespace) -> List[UBMatrix]:
    """Every --coords file, then every --dense file compressed with the structure check."""
    tol = tolerances_from_args(args)
    matrices = [read_coordinates(path, tol) for path in (args.coords or [])]
    if args.dense:
        partition = partition_from_args(args)
        if partition is None:
            raise InputFormatError("--dense needs --partition")
        matrices.extend(read_dense_as_ub(path, partition, tol) for path in args.dense)
    return matrices


def emit(args: argparse.Namespace, model: BaseModel, human: str) -> None:
    """JSON (with --json) or the human table, to stdout or --output."""
    if getattr(args, "json", False):
        write_or_print(dump_json(model), args.output)
    elif args.output:
        atomic_write_text(args.output, human)
    else:
        print(human, end="")


def format_row(label: str, values, width: int = 14) -> str:
    cells = "".join(f"{v:>{width}.6g}" for v in values)
    return f"{label:<12}{cells}\n"


def format_coordinates(x: UBMatrix, title: str = "") -> str:
    lines = [f"{title}\n"] if title else []
    lines.append(f"partition   {x.partition}\n")
    lines.append(format_row("a", x.a))
    for k, row in enumerate(x.b):
        lines.append(format_row(f"b[{k + 1}]", row))
    if not x.symmetric:
        lines.append("note        product of non-commuting operands (b is not symmetric)\n")
    return "".join(lines)
