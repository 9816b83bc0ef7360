"""Deterministic CSV and JSON writers."""
from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path

OUTPUT_DIR_ENV = "PPN_ATOM_OUTPUT_DIR"


def output_dir(default: str | os.PathLike = ".") -> Path:
    """Directory for reports: ``$PPN_ATOM_OUTPUT_DIR`` if set, else ``default``."""
    return Path(os.environ.get(OUTPUT_DIR_ENV, default))


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.16e}"
    return str(value)


def to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    """Header row plus one line per row; floats in scientific notation with 17 significant digits."""
    if not rows:
        return ""
    columns = list(rows[0]) if columns is None else columns
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(col, "")) for col in columns])
    return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    return obj


def to_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def write(text: str, path: str | os.PathLike | None) -> None:
    """Write to ``path`` (relative paths go under the output directory) or stdout."""
    if path is None or str(path) == "-":
        print(text, end="")
        return
    path = Path(path)
    if not path.is_absolute():
        path = output_dir() / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
