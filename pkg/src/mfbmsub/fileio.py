"""Readers/writers for the toolkit's file formats.

Curve CSV: one ``#``-prefixed JSON header line carrying the fully-resolved
run configuration and tool version, a column-name row, then float rows
(17 significant digits, so reruns are byte-identical).  Fits and verdicts are
standalone JSON with the same embedded config.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = ["write_curve_csv", "read_curve_csv", "write_json", "fmt_float"]


def fmt_float(v: float) -> str:
    return f"{float(v):.17g}"


def write_curve_csv(path, header: dict, columns: dict) -> None:
    """columns: ordered mapping name -> 1-D array, all of one length."""
    path = Path(path)
    arrays = [np.asarray(c, dtype=float) for c in columns.values()]
    lines = ["# " + json.dumps(header, sort_keys=True, separators=(",", ":"))]
    lines.append(",".join(columns))
    for row in zip(*arrays):
        lines.append(",".join(fmt_float(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_curve_csv(path) -> tuple[dict, dict]:
    """Returns (header dict, column name -> float array)."""
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing '#'-prefixed JSON header line")
    header = json.loads(text[0][1:].strip())
    if len(text) < 2:
        raise ValueError(f"{path}: missing column-name row")
    names = text[1].split(",")
    rows = [line.split(",") for line in text[2:] if line.strip()]
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(names)))
    return header, {n: data[:, i] for i, n in enumerate(names)}


def _json_default(o):
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def write_json(path, obj: dict) -> None:
    Path(path).write_text(
        json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n")
