"""Profile data model: records, commit snapshots, ingestion and synthesis.

A ProfileRecord captures how the test suite behaved on one test input:
execution time, memory, and a handful of code-behavior counters. Records
are grouped per commit into a CommitSnapshot; snapshots are immutable
after ingest.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    DuplicateInput,
    EmptyDataset,
    InvalidSpec,
    MalformedRow,
    UnknownInput,
)

# Attribute names used for clustering/statistics, in canonical order.
ATTRIBUTES = (
    "input_size",
    "exec_time",
    "memory",
    "iterations",
    "statements",
    "function_calls",
    "conditionals",
)

DEFAULT_FEATURES = ("input_size", "statements", "exec_time")

# Column names as they appear on disk (CSV header / JSON keys).
_FILE_FIELDS = (
    "input_id",
    "input_size",
    "exec_time_ms",
    "memory_kb",
    "iterations",
    "statements",
    "function_calls",
    "conditionals",
)

_COUNTER_FIELDS = ("input_size", "iterations", "statements", "function_calls", "conditionals")

REAL_PRECISION = 6  # significant digits used when serializing reals


def format_real(x: float, precision: int = REAL_PRECISION) -> str:
    return format(float(x), f".{precision}g")


def quantize_real(x: float, precision: int = REAL_PRECISION) -> float:
    return float(format_real(x, precision))


@dataclass(frozen=True)
class ProfileRecord:
    input_id: str
    input_size: int
    exec_time: float  # milliseconds
    memory: float  # kilobytes
    iterations: int
    statements: int
    function_calls: int
    conditionals: int
    test_case: Optional[str] = None

    def validate(self) -> None:
        if not self.input_id:
            raise ValueError("input_id must be non-empty")
        if not (self.exec_time > 0):
            raise ValueError("exec_time must be > 0")
        if self.memory < 0:
            raise ValueError("memory must be >= 0")
        for name in _COUNTER_FIELDS:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def attribute(self, name: str) -> float:
        return float(getattr(self, name))


@dataclass(frozen=True)
class CommitSnapshot:
    commit_id: str
    records: tuple[ProfileRecord, ...]
    captured_at: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    def record_ids(self) -> list[str]:
        return [r.input_id for r in self.records]

    def find(self, input_id: str) -> ProfileRecord:
        for r in self.records:
            if r.input_id == input_id:
                return r
        raise UnknownInput(input_id)

    def total_exec_time(self) -> float:
        return float(sum(r.exec_time for r in self.records))


def _parse_row(row: dict, line: int) -> ProfileRecord:
    def need(key):
        if key not in row or row[key] in (None, ""):
            raise MalformedRow(line, f"missing field {key!r}")
        return row[key]

    try:
        rec = ProfileRecord(
            input_id=str(need("input_id")),
            input_size=int(need("input_size")),
            exec_time=float(need("exec_time_ms")),
            memory=float(need("memory_kb")),
            iterations=int(need("iterations")),
            statements=int(need("statements")),
            function_calls=int(need("function_calls")),
            conditionals=int(need("conditionals")),
            test_case=str(row["test_case"]) if row.get("test_case") not in (None, "") else None,
        )
    except MalformedRow:
        raise
    except (TypeError, ValueError) as exc:
        raise MalformedRow(line, str(exc)) from exc
    try:
        rec.validate()
    except ValueError as exc:
        raise MalformedRow(line, str(exc)) from exc
    return rec


def _check_unique(records: Sequence[ProfileRecord]) -> None:
    seen = set()
    for r in records:
        key = (r.input_id, r.test_case)
        if key in seen:
            raise DuplicateInput(r.input_id)
        seen.add(key)


def ingest(path: str | Path, format: str, commit_id: str, captured_at: float = 0.0) -> CommitSnapshot:
    """Read a profile file (csv or json) into a validated snapshot.

    Malformed rows and duplicate (input_id, test_case) pairs raise; an
    empty file raises EmptyDataset.
    """
    path = Path(path)
    records: list[ProfileRecord] = []
    if format == "csv":
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise EmptyDataset(f"{path} has no header")
            for i, row in enumerate(reader, start=2):
                records.append(_parse_row(row, i))
    elif format == "json":
        with path.open(encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, list):
            raise MalformedRow(0, "expected a JSON array of objects")
        for i, row in enumerate(data):
            if not isinstance(row, dict):
                raise MalformedRow(i, "expected a JSON object")
            records.append(_parse_row(row, i))
    else:
        raise ValueError(f"unknown format {format!r}")

    if not records:
        raise EmptyDataset(str(path))
    _check_unique(records)
    return CommitSnapshot(commit_id=commit_id, records=tuple(records), captured_at=captured_at)


def record_to_file_dict(r: ProfileRecord) -> dict:
    d = {
        "input_id": r.input_id,
        "input_size": r.input_size,
        "exec_time_ms": format_real(r.exec_time),
        "memory_kb": format_real(r.memory),
        "iterations": r.iterations,
        "statements": r.statements,
        "function_calls": r.function_calls,
        "conditionals": r.conditionals,
    }
    if r.test_case is not None:
        d["test_case"] = r.test_case
    return d


def save_snapshot_json(snapshot: CommitSnapshot, path: str | Path) -> None:
    """Write the snapshot as a JSON array of row objects (the ingest format)."""
    rows = [record_to_file_dict(r) for r in snapshot.records]
    Path(path).write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")


def save_snapshot_csv(snapshot: CommitSnapshot, path: str | Path) -> None:
    has_tc = any(r.test_case is not None for r in snapshot.records)
    fields = list(_FILE_FIELDS) + (["test_case"] if has_tc else [])
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in snapshot.records:
            row = record_to_file_dict(r)
            if has_tc:
                row.setdefault("test_case", "")
            writer.writerow(row)


def aggregate_by_input(snapshot: CommitSnapshot) -> CommitSnapshot:
    """Collapse per-test-case rows to one row per input.

    Counters and times are summed, memory takes the max (peak across test
    cases). Snapshots without test_case rows are returned unchanged.
    """
    if all(r.test_case is None for r in snapshot.records):
        return snapshot
    order: list[str] = []
    groups: dict[str, list[ProfileRecord]] = {}
    for r in snapshot.records:
        if r.input_id not in groups:
            groups[r.input_id] = []
            order.append(r.input_id)
        groups[r.input_id].append(r)
    merged = []
    for input_id in order:
        rows = groups[input_id]
        merged.append(
            ProfileRecord(
                input_id=input_id,
                input_size=rows[0].input_size,
                exec_time=quantize_real(sum(r.exec_time for r in rows)),
                memory=quantize_real(max(r.memory for r in rows)),
                iterations=sum(r.iterations for r in rows),
                statements=sum(r.statements for r in rows),
                function_calls=sum(r.function_calls for r in rows),
                conditionals=sum(r.conditionals for r in rows),
                test_case=None,
            )
        )
    return CommitSnapshot(snapshot.commit_id, tuple(merged), snapshot.captured_at)


# ---------------------------------------------------------------------------
# Synthetic data


@dataclass(frozen=True)
class BlobSpec:
    """One gaussian blob of test inputs in attribute space."""

    count: int
    input_size: tuple[float, float] = (1000.0, 100.0)  # (mean, spread)
    memory: tuple[float, float] = (512.0, 32.0)
    iterations: tuple[float, float] = (2000.0, 150.0)
    statements: tuple[float, float] = (5000.0, 300.0)
    function_calls: tuple[float, float] = (400.0, 30.0)
    conditionals: tuple[float, float] = (200.0, 15.0)
    time_coef: Optional[float] = None  # overrides the global model
    time_noise: Optional[float] = None


@dataclass(frozen=True)
class SyntheticSpec:
    """Declarative dataset: blobs plus a linear exec_time model.

    exec_time = time_coef * statements + N(0, time_noise), clamped positive.
    """

    blobs: tuple[BlobSpec, ...]
    time_coef: float = 0.01
    time_noise: float = 1.0

    def validate(self) -> None:
        if not self.blobs:
            raise InvalidSpec("at least one blob required")
        for b in self.blobs:
            if b.count <= 0:
                raise InvalidSpec("blob count must be positive")
            for name in ("input_size", "memory", "iterations", "statements",
                         "function_calls", "conditionals"):
                mean, spread = getattr(b, name)
                if spread <= 0:
                    raise InvalidSpec(f"{name} spread must be positive")
        if self.time_noise <= 0:
            raise InvalidSpec("time_noise must be positive")

    @staticmethod
    def from_dict(d: dict) -> "SyntheticSpec":
        blobs = []
        for b in d.get("blobs", []):
            kwargs = {"count": int(b["count"])}
            for name in ("input_size", "memory", "iterations", "statements",
                         "function_calls", "conditionals"):
                if name in b:
                    kwargs[name] = (float(b[name]["mean"]), float(b[name]["spread"]))
            if "time_coef" in b:
                kwargs["time_coef"] = float(b["time_coef"])
            if "time_noise" in b:
                kwargs["time_noise"] = float(b["time_noise"])
            blobs.append(BlobSpec(**kwargs))
        tm = d.get("time_model", {})
        return SyntheticSpec(
            blobs=tuple(blobs),
            time_coef=float(tm.get("coef", 0.01)),
            time_noise=float(tm.get("noise", 1.0)),
        )


def generate_synthetic(spec: SyntheticSpec, seed: int, commit_id: str = "synthetic") -> CommitSnapshot:
    """Deterministic synthetic snapshot for a (spec, seed) pair."""
    spec.validate()
    rng = np.random.default_rng(seed)
    records: list[ProfileRecord] = []
    for bi, blob in enumerate(spec.blobs):
        n = blob.count
        cols = {}
        for name in ("input_size", "memory", "iterations", "statements",
                     "function_calls", "conditionals"):
            mean, spread = getattr(blob, name)
            cols[name] = rng.normal(mean, spread, size=n)
        coef = blob.time_coef if blob.time_coef is not None else spec.time_coef
        noise = blob.time_noise if blob.time_noise is not None else spec.time_noise
        statements = np.maximum(np.rint(cols["statements"]), 1).astype(int)
        exec_time = coef * statements + rng.normal(0.0, noise, size=n)
        exec_time = np.maximum(exec_time, 1e-3)
        for i in range(n):
            records.append(
                ProfileRecord(
                    input_id=f"b{bi}_{i:04d}",
                    input_size=max(int(round(cols["input_size"][i])), 0),
                    exec_time=quantize_real(float(exec_time[i])),
                    memory=quantize_real(max(float(cols["memory"][i]), 0.0)),
                    iterations=max(int(round(cols["iterations"][i])), 0),
                    statements=int(statements[i]),
                    function_calls=max(int(round(cols["function_calls"][i])), 0),
                    conditionals=max(int(round(cols["conditionals"][i])), 0),
                )
            )
    return CommitSnapshot(commit_id=commit_id, records=tuple(records))


def apply_slowdown(snapshot: CommitSnapshot, input_ids: Iterable[str], factor: float) -> CommitSnapshot:
    """Multiply exec_time of the selected records by (1 + factor).

    Simulates a bottleneck update confined to some inputs; everything
    else is untouched.
    """
    if factor < 0:
        raise ValueError("factor must be >= 0")
    targets = set(input_ids)
    known = {r.input_id for r in snapshot.records}
    for input_id in targets:
        if input_id not in known:
            raise UnknownInput(input_id)
    new_records = []
    for r in snapshot.records:
        if r.input_id in targets:
            new_records.append(replace(r, exec_time=quantize_real(r.exec_time * (1.0 + factor))))
        else:
            new_records.append(r)
    return CommitSnapshot(snapshot.commit_id, tuple(new_records), snapshot.captured_at)
