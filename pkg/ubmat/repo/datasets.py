"""Dataset CSV files, group labels and inline vectors."""

import csv
import io
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from ubmat.core.errors import InputFormatError
from ubmat.repo.coordinates import parse_number
from ubmat.repo.files import read_bytes
from ubmat.service.estimation import Dataset
from ubmat.service.ub_matrix import PartitionVector


def _read_text(path: str | Path) -> str:
    try:
        return read_bytes(path).decode("utf-8")
    except UnicodeDecodeError:
        raise InputFormatError("file is not UTF-8 text", path=str(path))


def _records(text: str) -> List[Tuple[int, List[str]]]:
    return [
        (line, record)
        for line, record in enumerate(csv.reader(io.StringIO(text)), start=1)
        if record and any(cell.strip() for cell in record)
    ]


def parse_dataset(text: str, partition: PartitionVector, path: str = "<input>", header: bool = False,
                  label_column: Optional[str] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Parse observation rows (and an optional label column).

    ``label_column`` is a header name when ``header`` is set, otherwise a
    1-based column number.
    """
    records = _records(text)
    if header:
        if not records:
            raise InputFormatError("dataset is empty", path=path)
        _, names = records[0]
        records = records[1:]
    else:
        names = None

    label_index = None
    if label_column is not None:
        if names is not None and label_column in [n.strip() for n in names]:
            label_index = [n.strip() for n in names].index(label_column)
        else:
            try:
                label_index = int(label_column) - 1
            except ValueError:
                raise InputFormatError(f"label column {label_column!r} not found in header", path=path, line=1)

    rows = []
    labels = []
    width = partition.total + (1 if label_index is not None else 0)
    for line, record in records:
        if len(record) != width:
            raise InputFormatError(f"row has {len(record)} fields, expected {width}", path=path, line=line)
        values = []
        for col, cell in enumerate(record, start=1):
            if col - 1 == label_index:
                labels.append(cell.strip())
            else:
                values.append(parse_number(cell, path, line, col))
        rows.append(values)

    if not rows:
        raise InputFormatError("dataset has no observations", path=path)
    return np.asarray(rows, dtype=np.float64), (np.asarray(labels) if label_index is not None else None)


def parse_labels(text: str, path: str = "<input>") -> np.ndarray:
    """Single-column label file, one label per observation."""
    labels = []
    for line, record in _records(text):
        if len(record) != 1:
            raise InputFormatError(f"label file must have one column, found {len(record)}", path=path, line=line)
        labels.append(record[0].strip())
    return np.asarray(labels)


def read_dataset(path: str | Path, partition: PartitionVector, header: bool = False,
                 labels_path: Optional[str | Path] = None,
                 label_column: Optional[str] = None) -> Dataset:
    """Load a dataset CSV; labels come from a separate file or a named column."""
    if labels_path is not None and label_column is not None:
        raise InputFormatError("use either a labels file or a label column, not both")

    observations, labels = parse_dataset(_read_text(path), partition, str(path), header, label_column)
    if labels_path is not None:
        labels = parse_labels(_read_text(labels_path), str(labels_path))
        if labels.size != observations.shape[0]:
            raise InputFormatError(
                f"{labels.size} labels for {observations.shape[0]} observations", path=str(labels_path)
            )
    return Dataset(observations, partition, labels)


def parse_vector(value: str, length: int) -> np.ndarray:
    """
    A p-vector given inline (``0,0.5,1``), as a single number repeated, or
    as the path of a one-row CSV file.
    """
    candidate = Path(value)
    if candidate.is_file():
        text = _read_text(candidate).strip()
        source = str(candidate)
    else:
        text = value
        source = "<inline>"

    cells = [cell for cell in text.replace("\n", ",").split(",") if cell.strip()]
    numbers = [parse_number(cell, source, 1, col) for col, cell in enumerate(cells, start=1)]
    if len(numbers) == 1:
        numbers = numbers * length
    if len(numbers) != length:
        raise InputFormatError(f"vector has {len(numbers)} entries, expected {length}", path=source)
    return np.asarray(numbers, dtype=np.float64)
