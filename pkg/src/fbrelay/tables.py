"""Deterministic CSV / JSON serialization of result tables."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SIG_DIGITS = 12


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"{self.name}: expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(list(values))

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _check_finite(x, where):
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in {where}")


def format_number(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        _check_finite(x, "table")
        return f"{x:.{SIG_DIGITS - 1}e}"
    return str(x)


def json_value(x):
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        _check_finite(x, "table")
        return float(f"{x:.{SIG_DIGITS - 1}e}")
    return str(x)


def table_to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def tables_to_json(tables) -> str:
    doc = {
        t.name: [dict(zip(t.columns, (json_value(v) for v in row))) for row in t.rows]
        for t in tables
    }
    return json.dumps(doc, indent=2) + "\n"


def matrix_table(name, n_grid, k_grid, matrix) -> Table:
    """Matrix with a header row of k values and a leading column of n values."""
    t = Table(name, ["n\\k", *[format_number(float(k)) for k in k_grid]])
    for n, row in zip(n_grid, np.asarray(matrix)):
        t.add(int(n), *[float(v) for v in row])
    return t


def read_matrix_csv(text: str):
    """Parse a matrix written by :func:`matrix_table`; returns ``(n, k, values)``."""
    rows = list(csv.reader(io.StringIO(text)))
    k_grid = [float(v) for v in rows[0][1:]]
    n_grid = [int(r[0]) for r in rows[1:]]
    values = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return n_grid, k_grid, values


def write_tables(tables, fmt: str, out: str | None, stream) -> list:
    """Write tables as CSV or JSON; returns the paths written.

    A single JSON document holds every table. For CSV the first table goes to
    ``out`` and each further table to ``<stem>.<name>.csv`` next to it. With
    no ``out`` everything goes to ``stream``.
    """
    tables = list(tables)
    if fmt == "json":
        text = tables_to_json(tables)
        if out is None:
            stream.write(text)
            return []
        Path(out).write_text(text)
        return [out]
    if out is None:
        for i, t in enumerate(tables):
            if len(tables) > 1:
                stream.write(("" if i == 0 else "\n") + f"# {t.name}\n")
            stream.write(table_to_csv(t))
        return []
    path = Path(out)
    written = []
    for i, t in enumerate(tables):
        target = path if i == 0 else path.with_name(f"{path.stem}.{t.name}{path.suffix or '.csv'}")
        target.write_text(table_to_csv(t))
        written.append(str(target))
    return written
