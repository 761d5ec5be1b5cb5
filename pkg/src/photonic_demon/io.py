"""
Tabular JSON / CSV documents with an embedded run configuration.

Every output is a :class:`Document`: the command that produced it, the fully
resolved configuration, a dict of scalar results and a table.  JSON stores it
as one object; CSV stores ``config`` and ``summary`` as ``#``-prefixed JSON
comment lines above the table.  Floats are written with ``repr`` so both
formats read back bit-exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from photonic_demon.demon import DeltaNDistribution
from photonic_demon.interference import OutcomeDistribution

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class Document:
    command: str
    config: dict
    summary: dict = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)
    rows: list[list[Any]] = field(default_factory=list)

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, row)) for row in self.rows]


def _plain(value):
    """Make numpy scalars and fractions JSON-friendly."""
    if isinstance(value, Fraction):
        return float(value)
    if hasattr(value, "item") and not isinstance(value, (list, dict, str)):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def to_json(doc: Document) -> str:
    head = {
        "command": doc.command,
        "config": _plain(doc.config),
        "summary": _plain(doc.summary),
        "columns": list(doc.columns),
    }
    text = json.dumps(head, indent=2)[:-2]
    # one table row per line keeps large tables readable
    rows = ",\n    ".join(json.dumps(_plain(row)) for row in doc.rows)
    body = f"[\n    {rows}\n  ]" if doc.rows else "[]"
    return f'{text},\n  "rows": {body}\n}}\n'


def _cell(value) -> str:
    value = _plain(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(doc: Document) -> str:
    buf = io.StringIO()
    buf.write(f"# command: {doc.command}\n")
    buf.write(f"# config: {json.dumps(_plain(doc.config), sort_keys=False)}\n")
    buf.write(f"# summary: {json.dumps(_plain(doc.summary), sort_keys=False)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(doc.columns)
    for row in doc.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render(doc: Document, fmt: str = "json") -> str:
    if fmt == "json":
        return to_json(doc)
    if fmt == "csv":
        return to_csv(doc)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def write_document(doc: Document, path: Optional[str | Path], fmt: str = "json") -> str:
    text = render(doc, fmt)
    if path is not None:
        Path(path).write_text(text)
    return text


def _parse_cell(text: str):
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def parse_json(text: str) -> Document:
    obj = json.loads(text)
    return Document(obj["command"], obj["config"], obj.get("summary", {}), obj["columns"], obj["rows"])


def parse_csv(text: str) -> Document:
    header: dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# ") and ": " in line and not body:
            key, value = line[2:].split(": ", 1)
            header[key] = value
        else:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader, [])
    rows = [[_parse_cell(c) for c in row] for row in reader]
    return Document(header["command"], json.loads(header["config"]), json.loads(header["summary"]), columns, rows)


def read_document(path: str | Path) -> Document:
    text = Path(path).read_text()
    return parse_json(text) if text.lstrip().startswith("{") else parse_csv(text)


# -- typed tables -----------------------------------------------------------------


def distribution_table(dist: OutcomeDistribution) -> tuple[list[str], list[list]]:
    """Columns ``s0..s{M-1}, p, exact``; ``exact`` holds ``"num/den"`` for rational entries."""
    columns = [f"s{j}" for j in range(dist.M)] + ["p", "exact"]
    rows = []
    for s in sorted(dist.probs):
        p = dist.probs[s]
        exact = str(p) if isinstance(p, Fraction) else ""
        rows.append([*s, float(p), exact])
    return columns, rows


def distribution_from_document(doc: Document) -> OutcomeDistribution:
    M = sum(1 for c in doc.columns if c.startswith("s") and c[1:].isdigit())
    probs = {}
    for rec in doc.records():
        s = tuple(int(rec[f"s{j}"]) for j in range(M))
        exact = rec.get("exact", "")
        probs[s] = Fraction(exact) if exact not in ("", None) else float(rec["p"])
    N = sum(next(iter(probs))) if probs else 0
    return OutcomeDistribution(M, N, probs)


def delta_n_table(dist: DeltaNDistribution) -> tuple[list[str], list[list]]:
    columns = ["dn", "p", "exact"]
    rows = []
    for k, p in dist.probs.items():
        exact = str(p) if isinstance(p, Fraction) else ""
        rows.append([k, float(p), exact])
    return columns, rows


def delta_n_from_document(doc: Document) -> DeltaNDistribution:
    probs = {}
    for rec in doc.records():
        exact = rec.get("exact", "")
        probs[rec["dn"]] = Fraction(exact) if exact not in ("", None) else float(rec["p"])
    mean = doc.summary.get("mean_exact") or doc.summary["mean"]
    mean = Fraction(mean) if isinstance(mean, str) else mean
    return DeltaNDistribution(probs, mean, doc.summary.get("std_error", 0.0))


def delta_n_summary(dist: DeltaNDistribution) -> dict:
    out = {"mean": float(dist.mean), "std_error": float(dist.std_error)}
    if isinstance(dist.mean, Fraction):
        out["mean_exact"] = str(dist.mean)
    return out


def parse_int_list(text: str | Sequence[int]) -> tuple[int, ...]:
    if isinstance(text, str):
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    return tuple(int(x) for x in text)


def parse_float_list(text: str | Sequence[float]) -> tuple[float, ...]:
    if isinstance(text, str):
        return tuple(float(x) for x in text.replace(" ", "").split(",") if x)
    return tuple(float(x) for x in text)
