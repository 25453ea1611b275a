# Repository exports
from ubmat.repo.files import (
    dump_json,
    atomic_write_bytes,
    atomic_write_text,
    atomic_write_json,
    read_json,
    read_model,
    write_or_print
)
from ubmat.repo.coordinates import (
    read_coordinates,
    write_coordinates,
    parse_dense_csv,
    read_dense,
    read_dense_as_ub,
    format_dense_csv,
    write_dense
)
from ubmat.repo.datasets import (
    parse_dataset,
    parse_labels,
    read_dataset,
    parse_vector
)

__all__ = [
    "dump_json",
    "atomic_write_bytes",
    "atomic_write_text",
    "atomic_write_json",
    "read_json",
    "read_model",
    "write_or_print",
    "read_coordinates",
    "write_coordinates",
    "parse_dense_csv",
    "read_dense",
    "read_dense_as_ub",
    "format_dense_csv",
    "write_dense",
    "parse_dataset",
    "parse_labels",
    "read_dataset",
    "parse_vector"
]
