"""CSV/JSON readers with hard schema checks.

The figure scripts never recompute physics: they parse the dicke-rap
output schemas and plot the columns as-is.  A missing column is a hard
error naming exactly what was expected.
"""
from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """Input file does not match the expected dicke-rap schema."""


def read_csv_columns(path) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file, no header row")
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: header only, no data rows")
    data = np.empty((len(rows), len(header)))
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise SchemaError(
                f"{path}: row {i + 2} has {len(row)} fields, expected "
                f"{len(header)}")
        data[i] = [float(x) for x in row]
    return {name: data[:, j] for j, name in enumerate(header)}


def require_columns(cols: dict, needed: list[str], path) -> None:
    missing = [c for c in needed if c not in cols]
    if missing:
        raise SchemaError(
            f"{path}: missing column(s) {missing}; found {sorted(cols)}")


def population_columns(cols: dict, path) -> list[str]:
    """The p_m_<m> columns of a trace CSV, ordered by ascending m."""
    pat = re.compile(r"^p_m_(-?\d+)$")
    found = [(int(m.group(1)), name) for name in cols
             if (m := pat.match(name))]
    if not found:
        raise SchemaError(f"{path}: no p_m_<m> population columns found")
    found.sort()
    ms = [m for m, _ in found]
    if ms != list(range(ms[0], ms[-1] + 1)) or ms[0] != -ms[-1]:
        raise SchemaError(f"{path}: population columns not a full ladder: {ms}")
    return [name for _, name in found]


def level_columns(cols: dict, path) -> tuple[list[str], list[str]]:
    diab = sorted((c for c in cols if c.startswith("e_diab_m_")),
                  key=lambda c: abs(int(c.rsplit("_", 1)[1])) * 2
                  - (int(c.rsplit("_", 1)[1]) > 0))
    adiab = sorted((c for c in cols if c.startswith("e_adiab_")),
                   key=lambda c: int(c.rsplit("_", 1)[1]))
    if not diab or not adiab:
        raise SchemaError(
            f"{path}: expected e_diab_m_<m> and e_adiab_<i> columns; "
            f"found {sorted(cols)}")
    return diab, adiab


def read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
