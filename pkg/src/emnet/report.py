"""Tabular output: CSV at printed precision, JSON at full precision."""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .baselines import CentralityTable
from .cycles import CombatCycle
from .effectiveness import CapabilityReport, CriticalityRow
from .network import id_key
from .physics import BerModel, ber_curve, comm_capability

# column formats
CAP = "cap"  # 4 decimals
PCT = "pct"  # 2 decimals with a percent sign
INT = "int"
REAL = "real"
TEXT = "text"


@dataclass(frozen=True)
class Column:
    name: str
    fmt: str = TEXT


def _csv_cell(value: Any, fmt: str) -> str:
    if value is None:
        return ""
    if fmt == CAP:
        return f"{value:.4f}"
    if fmt == PCT:
        return f"{value:.2f}%"
    if fmt == INT:
        return str(int(value))
    if fmt == REAL:
        return f"{value:.6g}"
    return str(value)


def render(rows: Iterable[Mapping[str, Any]], columns: Sequence[Column], fmt: str = "csv") -> str:
    rows = list(rows)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([c.name for c in columns])
        for row in rows:
            writer.writerow([_csv_cell(row.get(c.name), c.fmt) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        records = [{c.name: row.get(c.name) for c in columns} for row in rows]
        return json.dumps(records, indent=2) + "\n"
    raise ValueError(f"unknown output format {fmt!r}")


def emit_table(
    rows: Iterable[Mapping[str, Any]],
    columns: Sequence[Column],
    fmt: str = "csv",
    destination: str | Path | None = None,
) -> int:
    """Write a table to ``destination`` (stdout when None); returns bytes written."""
    data = render(rows, columns, fmt).encode("utf-8")
    if destination is None:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
    else:
        Path(destination).write_bytes(data)
    return len(data)


# -- row builders ------------------------------------------------------------

CAPABILITY_COLUMNS = [Column("target"), Column("weight", REAL), Column("cycles", INT), Column("capability", CAP)]


def capability_rows(report: CapabilityReport) -> list[dict]:
    rows = [
        {
            "target": t,
            "weight": report.weights.get(t),
            "cycles": report.cycle_counts[t],
            "capability": report.per_target[t],
        }
        for t in sorted(report.per_target, key=id_key)
    ]
    rows.append(
        {
            "target": "total",
            "weight": sum(report.weights.values()) if report.weights else None,
            "cycles": sum(report.cycle_counts.values()),
            "capability": report.total,
        }
    )
    return rows


RANK_COLUMNS = [
    Column("delete_node"),
    Column("label"),
    Column("capability", CAP),
    Column("criticality", PCT),
    Column("rank", INT),
    Column("baseline", CAP),
]


def rank_table(base: float, rows: Sequence[CriticalityRow]) -> list[dict]:
    return [
        {
            "delete_node": r.node,
            "label": r.label,
            "capability": r.capability_after_deletion,
            "criticality": r.crt,
            "rank": r.rank,
            "baseline": base,
        }
        for r in rows
    ]


CYCLE_COLUMNS = [Column("target"), Column("nodes"), Column("edges", INT), Column("capability", CAP)]


def cycle_rows(cycles: Sequence[CombatCycle]) -> list[dict]:
    return [
        {
            "target": c.target,
            "nodes": "->".join((*c.nodes, c.target)),
            "edges": len(c),
            "capability": c.capability,
        }
        for c in cycles
    ]


def centrality_columns(methods: Sequence[str]) -> list[Column]:
    cols = [Column("node"), Column("crt", PCT), Column("crt_rank", INT)]
    for m in methods:
        cols += [Column(m, INT if m in ("degree", "cycle_count") else REAL), Column(f"{m}_rank", INT)]
    return cols


def centrality_rows(crt: Sequence[CriticalityRow], tables: Mapping[str, CentralityTable]) -> list[dict]:
    rows = []
    for r in crt:
        row = {"node": r.node, "crt": r.crt, "crt_rank": r.rank}
        for name, table in tables.items():
            row[name] = table.scores[r.node]
            row[f"{name}_rank"] = table.ranks[r.node]
        rows.append(row)
    return rows


TIE_COLUMNS = [Column("method"), Column("rank", INT), Column("nodes")]


def tie_rows(tables: Mapping[str, CentralityTable]) -> list[dict]:
    return [
        {"method": name, "rank": r, "nodes": " ".join(nodes)}
        for name, table in tables.items()
        for r, nodes in table.tie_groups()
    ]


BER_COLUMNS = [Column("sinr_db", REAL), Column("ber", REAL), Column("comm_capability", REAL)]


def ber_curve_rows(model: BerModel, lo: float = -10.0, hi: float = 30.0, step: float = 0.25) -> list[dict]:
    count = int(round((hi - lo) / step)) + 1
    xs = [lo + k * step for k in range(count)]
    return [
        {"sinr_db": x, "ber": b, "comm_capability": comm_capability(b)}
        for x, b in zip(xs, ber_curve(model, xs))
    ]


CRT_BAR_COLUMNS = [Column("node"), Column("label"), Column("criticality", PCT)]


def crt_bar_rows(rows: Sequence[CriticalityRow]) -> list[dict]:
    return [{"node": r.node, "label": r.label, "criticality": r.crt} for r in rows]
