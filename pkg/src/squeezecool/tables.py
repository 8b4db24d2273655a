"""Column tables and their deterministic CSV / JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

FLOAT_FORMAT = ".10g"


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    # column -> (description, units)
    semantics: dict[str, tuple[str, str]] = field(default_factory=dict)

    def add(self, *row) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} values, expected {len(self.columns)}")
        self.rows.append(tuple(row))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, complex):
        return f"{format_value(v.real)}{'+' if v.imag >= 0 or math.isnan(v.imag) else '-'}" \
               f"{format_value(abs(v.imag))}j"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, FLOAT_FORMAT)
    if hasattr(v, "item"):  # numpy scalar
        return format_value(v.item())
    return str(v)


def _json_value(v: Any):
    if hasattr(v, "item") and not isinstance(v, (str, bytes)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return format_value(v)
    if isinstance(v, float):
        return float(format(v, FLOAT_FORMAT))
    if isinstance(v, complex):
        return format_value(v)
    return v


def render(table: Table, meta: dict[str, Any], fmt: str = "csv") -> str:
    """Serialize ``table`` with a metadata header; identical inputs give identical text."""
    meta_items = sorted((str(k), format_value(v)) for k, v in meta.items())
    if fmt == "csv":
        buf = io.StringIO()
        for k, v in meta_items:
            buf.write(f"# {k} = {v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([format_value(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "meta": dict(meta_items),
            "columns": table.columns,
            "data": {c: [_json_value(r[i]) for r in table.rows]
                     for i, c in enumerate(table.columns)},
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def manifest(tables: dict[str, Table], meta: dict[str, Any]) -> str:
    """JSON manifest mapping each file's columns to description and units."""
    doc = {
        "meta": {str(k): format_value(v) for k, v in sorted(meta.items())},
        "files": {
            name: {c: {"description": t.semantics.get(c, ("", ""))[0],
                       "units": t.semantics.get(c, ("", ""))[1]} for c in t.columns}
            for name, t in sorted(tables.items())
        },
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"
