"""Reading species data and writing report documents.

Counts files are ``species,count`` CSV (header optional); token files hold
one observation per line.  Reports are JSON with sorted keys, shortest
round-trip float formatting and no NaN/Infinity.
"""
from __future__ import annotations

import csv
import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .partition import SampleCounts

SCHEMA_VERSION = "v1"


class DataError(ValueError):
    """Malformed or invalid input data."""


def read_counts_csv(path) -> SampleCounts:
    counts: dict[str, int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 'species,count', got {len(row)} fields")
            species, raw = row[0].strip(), row[1].strip()
            if lineno == 1 and species.lower() == "species" and raw.lower() == "count":
                continue
            try:
                c = int(raw)
            except ValueError:
                raise DataError(f"{path}:{lineno}: count {raw!r} is not an integer") from None
            if c < 1:
                raise DataError(f"{path}:{lineno}: count must be >= 1, got {c}")
            if species in counts:
                raise DataError(f"{path}:{lineno}: duplicate species {species!r}")
            counts[species] = c
    if not counts:
        raise DataError(f"{path}: no data rows")
    return SampleCounts.from_mapping(counts)


def read_tokens(path) -> SampleCounts:
    with open(path, encoding="utf-8") as fh:
        tally = Counter(line.rstrip("\r\n") for line in fh if line.strip())
    if not tally:
        raise DataError(f"{path}: no tokens (empty sample)")
    return SampleCounts.from_mapping(tally)


def read_sample(path, fmt: str | None = None) -> SampleCounts:
    """Dispatch on ``fmt`` (``counts`` or ``tokens``); ``.csv`` files default to counts."""
    if fmt is None:
        fmt = "counts" if str(path).lower().endswith(".csv") else "tokens"
    if fmt == "counts":
        return read_counts_csv(path)
    if fmt == "tokens":
        return read_tokens(path)
    raise ValueError(f"unknown input format {fmt!r}")


def write_counts_csv(sample: SampleCounts, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["species", "count"])
        for lab, c in zip(sample.labels.tolist(), sample.counts.tolist()):
            if isinstance(lab, float) and lab.is_integer():
                lab = int(lab)
            w.writerow([lab, c])


@dataclass
class ReportDocument:
    kind: str
    config: dict
    results: dict | list
    seeds: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    schema: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "kind": self.kind,
            "config": self.config,
            "results": self.results,
            "seeds": self.seeds,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReportDocument":
        if d.get("schema") != SCHEMA_VERSION:
            raise DataError(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["kind"], d["config"], d["results"], d.get("seeds", {}), d.get("metadata", {}), d["schema"])


def _check_finite(obj, where="report"):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"non-finite number at {where}; NaN and infinities are not allowed in reports")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{where}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _check_finite(v, f"{where}[{i}]")


def dumps(doc: ReportDocument) -> str:
    d = doc.to_dict()
    _check_finite(d)
    return json.dumps(d, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(doc: ReportDocument, path) -> None:
    text = dumps(doc)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def read_report(path) -> ReportDocument:
    with open(path, encoding="utf-8") as fh:
        return ReportDocument.from_dict(json.load(fh))


def flatten(obj, prefix="") -> list[tuple[str, object]]:
    """``(dotted.key, scalar)`` rows for CSV output, in sorted key order."""
    rows = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows += flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            rows += flatten(v, f"{prefix}[{i}]")
    else:
        rows.append((prefix, obj))
    return rows


def to_csv(doc: ReportDocument) -> str:
    d = doc.to_dict()
    _check_finite(d)
    lines = ["key,value"]
    for k, v in flatten(d):
        if isinstance(v, float):
            v = repr(v)
        elif v is None:
            v = ""
        elif isinstance(v, bool):
            v = str(v).lower()
        lines.append(f"{k},{v}")
    return "\n".join(lines) + "\n"
