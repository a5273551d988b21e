"""Serialization of module reports to CSV, JSON and plain-text tables.

Output is byte-stable: fixed column order, floats with 12 significant
digits, booleans as ``true``/``false``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from functools import singledispatch

from .arithmetic import FieldRecord, ScanReport
from .orbifolds import SphericalSignature, SupergroupResult, format_signature, group_order
from .spectral import BoundChain

__all__ = ["FORMATS", "SCAN_COLUMNS", "emit", "orbifold_row", "field_row"]

FORMATS = ("csv", "json", "table")
SCAN_COLUMNS = ("d", "h", "w", "L2", "L2_err", "zeta_k2", "borel_lower", "passes_exact", "passes_crude")


def _num(x):
    if isinstance(x, bool) or not isinstance(x, float):
        return x
    return float(f"{x:.12g}")


def _cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.12g}"
    if isinstance(x, (list, tuple)):
        return ";".join(_cell(v) for v in x)
    return str(x)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _num(obj)


def field_row(rec: FieldRecord) -> dict:
    return {
        "d": rec.d,
        "h": rec.h,
        "w": rec.w,
        "L2": rec.l2,
        "L2_err": rec.l2_error,
        "zeta_k2": rec.zeta2,
        "borel_lower": rec.borel_lower,
        "passes_exact": rec.passes_exact,
        "passes_crude": rec.passes_crude,
    }


def orbifold_row(sig: SphericalSignature, result: SupergroupResult, verified: bool) -> dict:
    info = group_order(sig)
    return {
        "symbol": format_signature(sig),
        "case": sig.case(),
        "chi": str(info.chi),
        "order": info.order,
        "supergroup": format_signature(result.supergroup),
        "supergroup_order": group_order(result.supergroup).order,
        "index": result.index,
        "chain": " > ".join(f"{format_signature(s)}:{deg}" for s, deg in result.chain),
        "verified": verified,
    }


@singledispatch
def _payload(report):
    """Return (json object, column names, list of row dicts)."""
    if isinstance(report, dict):
        return report, list(report), [report]
    if isinstance(report, list):
        cols = list(report[0]) if report else []
        return report, cols, report
    raise TypeError(f"cannot emit {type(report).__name__}")


@_payload.register
def _(report: ScanReport):
    rows = [field_row(r) for r in report.records]
    obj = {
        "cutoff": report.cutoff,
        "crude_bound": report.crude_bound,
        "d_min": report.d_min,
        "d_max": report.d_max,
        "tol": report.tol,
        "n_scanned": report.n_scanned,
        "n_records": len(report.records),
        "n_passing": report.n_passing,
        "records": rows,
    }
    return obj, list(SCAN_COLUMNS), rows


@_payload.register
def _(report: BoundChain):
    row = asdict(report)
    return row, list(row), [row]


def _table(cols, rows) -> str:
    cells = [[_cell(r[c]) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def emit(report, fmt: str = "csv") -> str:
    """Serialize a report as ``csv``, ``json`` or ``table`` text."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    obj, cols, rows = _payload(report)
    if fmt == "json":
        return json.dumps(_clean(obj), indent=2) + "\n"
    if fmt == "table":
        return _table(cols, rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_cell(r[c]) for c in cols])
    return buf.getvalue()
