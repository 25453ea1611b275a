"""Coordinate JSON and dense CSV files."""

import csv
import io
import math
from pathlib import Path
from typing import List, Optional

import numpy as np

from ubmat.core.config import Tolerances
from ubmat.core.errors import InputFormatError
from ubmat.repo.files import atomic_write_json, atomic_write_text, read_bytes, read_model
from ubmat.schema.coordinates import UBCoordinates
from ubmat.service.ub_matrix import PartitionVector, UBMatrix, ub_compress


def read_coordinates(path: str | Path, tol: Optional[Tolerances] = None) -> UBMatrix:
    """Load ``{"partition": [...], "a": [...], "b": [[...]]}`` into a UBMatrix."""
    return read_model(path, UBCoordinates).to_ub(tol)


def write_coordinates(path: str | Path, x: UBMatrix) -> None:
    atomic_write_json(path, UBCoordinates.from_ub(x))


def parse_number(cell: str, path: str, line: int, column: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise InputFormatError(f"not a number: {cell.strip()!r}", path=path, line=line, column=column)
    if not math.isfinite(value):
        raise InputFormatError(f"non-finite value {cell.strip()!r}", path=path, line=line, column=column)
    return value


def parse_dense_csv(text: str, path: str = "<input>") -> np.ndarray:
    """Square matrix from CSV text: one row per line, no header."""
    rows: List[List[float]] = []
    lines: List[int] = []
    for line, record in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not record or all(not cell.strip() for cell in record):
            continue
        rows.append([parse_number(cell, path, line, col) for col, cell in enumerate(record, start=1)])
        lines.append(line)

    if not rows:
        raise InputFormatError("matrix file is empty", path=path)
    width = len(rows[0])
    for line, row in zip(lines, rows):
        if len(row) != width:
            raise InputFormatError(f"row has {len(row)} entries, expected {width}", path=path, line=line)
    if len(rows) != width:
        raise InputFormatError(f"matrix is {len(rows)} x {width}, expected a square matrix", path=path)
    return np.asarray(rows, dtype=np.float64)


def read_dense(path: str | Path) -> np.ndarray:
    raw = read_bytes(path)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise InputFormatError("file is not UTF-8 text", path=str(path))
    return parse_dense_csv(text, str(path))


def read_dense_as_ub(path: str | Path, partition: PartitionVector,
                     tol: Optional[Tolerances] = None) -> UBMatrix:
    """Dense CSV compressed straight away with the structure check."""
    return ub_compress(read_dense(path), partition, tol)


def format_dense_csv(m: np.ndarray) -> str:
    """Shortest round-trip float repr per entry."""
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in np.asarray(m))


def write_dense(path: str | Path, m: np.ndarray) -> None:
    atomic_write_text(path, format_dense_csv(m))
