"""
Deterministic artifact writers.

Every file is written to a temporary sibling first and moved into place with
os.replace, so readers never observe a half-written artifact.
"""

import csv
import io
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, Union

logger = logging.getLogger("chaoscomm.output")

PathLike = Union[str, Path]


def format_number(value: Any) -> str:
    """Numbers with 9 significant digits, everything else via str()."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "dtype"):
        return f"{float(value):.9g}"
    return str(value)


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except Exception as e:
        logger.error(f"Error writing {path}: {str(e)}")
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buffer.getvalue()


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a CSV table atomically."""
    path = atomic_write_text(path, csv_text(header, rows))
    logger.debug(f"Wrote {path}")
    return path


def key_value_text(values: Mapping[str, Any]) -> str:
    """``key=value`` lines in insertion order."""
    return "".join(f"{key}={format_number(value)}\n" for key, value in values.items())


def write_key_values(path: PathLike, values: Mapping[str, Any]) -> Path:
    return atomic_write_text(path, key_value_text(values))
