"""Loading and validation of scully-lamb run artifacts (CSV + manifest).

A data directory is either one CLI output directory (CSVs next to their
manifest.json) or a directory of such run directories; artifacts are found
by file name in either layout.  All columns are parsed as floats except
free-text ones listed by the caller.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

__all__ = ["FigplotsError", "Table", "find_artifact", "load_table", "load_manifest"]


class FigplotsError(RuntimeError):
    pass


class Table:
    """Column-oriented view of one CSV artifact."""

    def __init__(self, path: Path, columns: dict):
        self.path = path
        self.columns = columns

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def rows(self, **selects):
        mask = np.ones(len(next(iter(self.columns.values()))), dtype=bool)
        for key, value in selects.items():
            col = self.columns[key]
            if col.dtype.kind == "f":
                mask &= np.isclose(col, value, rtol=1e-12, atol=1e-12)
            else:
                mask &= col == value
        return {k: v[mask] for k, v in self.columns.items()}


def find_artifact(data_dir: Path, name: str) -> Path:
    """Locate ``name`` directly in data_dir or one level down."""
    data_dir = Path(data_dir)
    direct = data_dir / name
    if direct.is_file():
        return direct
    hits = sorted(p for p in data_dir.glob(f"*/{name}") if p.is_file())
    if not hits:
        raise FigplotsError(f"artifact {name!r} not found under {data_dir}")
    if len(hits) > 1:
        raise FigplotsError(
            f"artifact {name!r} is ambiguous under {data_dir}: "
            + ", ".join(str(h) for h in hits)
        )
    return hits[0]


def load_table(data_dir: Path, name: str, required: list[str], text_columns=()) -> Table:
    path = find_artifact(data_dir, name)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FigplotsError(f"{path}: empty file") from None
        rows = list(reader)
    missing = [c for c in required if c not in header]
    if missing:
        raise FigplotsError(f"{path}: missing columns {missing} (has {header})")
    if not rows:
        raise FigplotsError(f"{path}: no data rows")
    columns = {}
    for i, name_i in enumerate(header):
        raw = [r[i] for r in rows]
        if name_i in text_columns:
            columns[name_i] = np.array(raw)
        else:
            try:
                columns[name_i] = np.array([float(x) for x in raw])
            except ValueError as exc:
                raise FigplotsError(f"{path}: non-numeric value in column {name_i!r}: {exc}")
    return Table(path, columns)


def load_manifest(data_dir: Path, artifact_name: str) -> dict:
    """Manifest sitting next to the named artifact."""
    path = find_artifact(data_dir, artifact_name).parent / "manifest.json"
    if not path.is_file():
        raise FigplotsError(f"no manifest.json next to {artifact_name} in {path.parent}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FigplotsError(f"{path}: invalid JSON: {exc}") from exc
