"""File access: JSON encoding and atomic writes."""

import os
import tempfile
from pathlib import Path
from typing import Any, Optional, Type, TypeVar

import orjson
from pydantic import BaseModel, ValidationError

from ubmat.core.errors import InputFormatError

ModelT = TypeVar("ModelT", bound=BaseModel)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def dump_json(payload: Any) -> bytes:
    """Deterministic JSON bytes (sorted keys, two-space indent, trailing newline)."""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    return orjson.dumps(payload, option=JSON_OPTIONS) + b"\n"


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write through a temp file in the target directory, then rename over ``path``."""
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def atomic_write_json(path: str | Path, payload: Any) -> None:
    atomic_write_bytes(path, dump_json(payload))


def read_bytes(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputFormatError(f"cannot read file: {exc.strerror}", path=str(path))


def read_json(path: str | Path) -> Any:
    raw = read_bytes(path)
    try:
        return orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        line = getattr(exc, "lineno", None)
        column = getattr(exc, "colno", None)
        raise InputFormatError(f"invalid JSON: {exc.msg}", path=str(path), line=line, column=column)


def read_model(path: str | Path, model: Type[ModelT]) -> ModelT:
    """Load and validate a JSON file against a schema model."""
    data = read_json(path)
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "document"
        raise InputFormatError(f"{where}: {first['msg']}", path=str(path))


def write_or_print(payload: bytes, output: Optional[str]) -> None:
    """Send bytes to ``output`` atomically, or to stdout."""
    if output:
        atomic_write_bytes(output, payload)
    else:
        print(payload.decode("utf-8"), end="")
