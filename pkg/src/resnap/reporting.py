"""Aggregation into summary tables and CSV/JSON result export.

Exported files are deterministic for a given config and seed: column
order is fixed, floats use their shortest round-trip representation, and
the per-cell wall time is deliberately not written (it varies between
runs). Records therefore round-trip through either format with
``wall_time`` reset to zero.

Schemas:

* records (long format, one row per result):
  dataset, model, encoding, prefix_length, accuracy, n_train, n_test,
  leakage_fraction, best_params (JSON object), status
* accuracy_by_model (wide): model, then <encoding>_mean / <encoding>_std
  per encoding; mean and population std of accuracy across records.
* improvement_over_baseline (wide): same layout; values are paired
  differences against the SeqOnly record of the same (dataset, model,
  prefix length).
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .encodings import ENCODINGS
from .errors import ConfigError
from .experiment import ResultRecord

_RECORD_FIELDS = (
    "dataset",
    "model",
    "encoding",
    "prefix_length",
    "accuracy",
    "n_train",
    "n_test",
    "leakage_fraction",
    "best_params",
    "status",
)


@dataclass(frozen=True)
class AggregateCell:
    model: str
    encoding: str
    mean: float
    std: float
    n: int


@dataclass(frozen=True)
class AggregateTable:
    accuracy: tuple[AggregateCell, ...]
    improvement: tuple[AggregateCell, ...]


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    mean = sum(values) / len(values)
    variance = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, math.sqrt(variance)


def aggregate(records: Iterable[ResultRecord]) -> AggregateTable:
    """Mean and population std per (model, encoding), plus paired gains."""
    ok = [r for r in records if r.status == "ok" and r.accuracy is not None]
    by_pair: dict[tuple[str, str], list[float]] = {}
    for r in ok:
        by_pair.setdefault((r.model, r.encoding), []).append(r.accuracy)
    accuracy_cells = tuple(
        AggregateCell(model, encoding, *_mean_std(vals), n=len(vals))
        for (model, encoding), vals in sorted(by_pair.items())
    )
    baseline = {
        (r.dataset, r.model, r.prefix_length): r.accuracy
        for r in ok
        if r.encoding == "SeqOnly"
    }
    diffs: dict[tuple[str, str], list[float]] = {}
    for r in ok:
        base = baseline.get((r.dataset, r.model, r.prefix_length))
        if base is None:
            continue
        diffs.setdefault((r.model, r.encoding), []).append(r.accuracy - base)
    improvement_cells = tuple(
        AggregateCell(model, encoding, *_mean_std(vals), n=len(vals))
        for (model, encoding), vals in sorted(diffs.items())
    )
    return AggregateTable(accuracy=accuracy_cells, improvement=improvement_cells)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))  # shortest round-trip form, numpy scalars included
    return str(value)


def _record_row(record: ResultRecord) -> dict:
    return {
        "dataset": record.dataset,
        "model": record.model,
        "encoding": record.encoding,
        "prefix_length": record.prefix_length,
        "accuracy": record.accuracy,
        "n_train": record.n_train,
        "n_test": record.n_test,
        "leakage_fraction": record.leakage_fraction,
        "best_params": dict(record.best_params),
        "status": record.status,
    }


def export_records(records: Sequence[ResultRecord], path: str | Path) -> Path:
    """Write the long-format records file; format comes from the suffix."""
    path = Path(path)
    if path.suffix == ".json":
        payload = {"records": [_record_row(r) for r in records]}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif path.suffix == ".csv":
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(_RECORD_FIELDS)
            for r in records:
                row = _record_row(r)
                row["best_params"] = json.dumps(row["best_params"], sort_keys=True)
                writer.writerow([_fmt(row[f]) for f in _RECORD_FIELDS])
    else:
        raise ConfigError(f"unsupported records format {path.suffix!r}")
    return path


def load_records(path: str | Path) -> list[ResultRecord]:
    """Read records back; wall_time is not stored and loads as zero."""
    path = Path(path)
    rows: list[dict]
    if path.suffix == ".json":
        rows = json.loads(path.read_text())["records"]
    elif path.suffix == ".csv":
        with open(path, newline="") as handle:
            rows = []
            for raw in csv.DictReader(handle):
                rows.append(
                    {
                        "dataset": raw["dataset"],
                        "model": raw["model"],
                        "encoding": raw["encoding"],
                        "prefix_length": int(raw["prefix_length"]),
                        "accuracy": float(raw["accuracy"]) if raw["accuracy"] else None,
                        "n_train": int(raw["n_train"]),
                        "n_test": int(raw["n_test"]),
                        "leakage_fraction": float(raw["leakage_fraction"]),
                        "best_params": json.loads(raw["best_params"]),
                        "status": raw["status"],
                    }
                )
    else:
        raise ConfigError(f"unsupported records format {path.suffix!r}")
    return [ResultRecord(wall_time=0.0, **row) for row in rows]


def _wide_rows(cells: Sequence[AggregateCell]) -> tuple[list[str], list[list]]:
    encodings = [e for e in ENCODINGS if any(c.encoding == e for c in cells)]
    header = ["model"]
    for enc in encodings:
        header += [f"{enc}_mean", f"{enc}_std"]
    by_key = {(c.model, c.encoding): c for c in cells}
    rows = []
    for model in sorted({c.model for c in cells}):
        row: list = [model]
        for enc in encodings:
            cell = by_key.get((model, enc))
            row += [cell.mean, cell.std] if cell else [None, None]
        rows.append(row)
    return header, rows


def _export_wide(cells: Sequence[AggregateCell], path: Path) -> Path:
    header, rows = _wide_rows(cells)
    if path.suffix == ".csv":
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    elif path.suffix == ".json":
        payload = [dict(zip(header, row)) for row in rows]
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        raise ConfigError(f"unsupported table format {path.suffix!r}")
    return path


def export_results(
    records: Sequence[ResultRecord],
    table: AggregateTable,
    out_dir: str | Path,
    formats: Sequence[str] = ("csv", "json"),
) -> list[Path]:
    """Write records plus both aggregate tables in each requested format."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for fmt in formats:
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unsupported export format {fmt!r}")
        written.append(export_records(records, out_dir / f"records.{fmt}"))
        written.append(_export_wide(table.accuracy, out_dir / f"accuracy_by_model.{fmt}"))
        written.append(
            _export_wide(table.improvement, out_dir / f"improvement_over_baseline.{fmt}")
        )
    return written
