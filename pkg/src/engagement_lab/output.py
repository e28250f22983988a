"""Atomic CSV/JSON writers.

Files are written to a temporary sibling and renamed into place, so a
failed run never leaves a partial output behind.  CSV files start with
``# key=value`` metadata lines, then a header row.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

__all__ = ["atomic_write_text", "write_csv", "write_json", "read_csv"]


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _cell(x):
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else ("inf" if x > 0 else ("-inf" if x < 0 else "nan"))
    return x


def write_csv(path, columns, rows, metadata: dict | None = None) -> Path:
    buf = io.StringIO()
    for key, value in (metadata or {}).items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} cells, expected {len(columns)}")
        writer.writerow([_cell(x) for x in row])
    return atomic_write_text(path, buf.getvalue())


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return _jsonable(obj.item())
    return obj


def write_json(path, obj) -> Path:
    return atomic_write_text(path, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Return ``(metadata, header, rows)`` with cells left as strings."""
    meta = {}
    lines = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition("=")
                meta[key] = value
            else:
                lines.append(line)
    reader = list(csv.reader(lines))
    return meta, reader[0], reader[1:]
