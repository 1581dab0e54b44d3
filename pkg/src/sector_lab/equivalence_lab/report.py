"""Experiment reports and their CSV / JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

__all__ = ["ExperimentReport", "emit_report", "read_report", "to_json", "to_csv"]


def _clean(value: Any) -> Any:
    """JSON-safe copy; non-finite floats become strings so that files stay standard JSON."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


@dataclass
class ExperimentReport:
    """Outcome of one experiment run.

    ``timestamp`` holds the wall-clock fields (``utc`` and
    ``runtime_seconds``); every other field is a pure function of the
    experiment kind, config and seed.
    """

    experiment: str
    config: dict
    seed: int
    scalars: dict[str, Any]
    columns: list[str]
    rows: list[dict]
    verdicts: dict[str, bool]
    notes: list[str] = field(default_factory=list)
    timestamp: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_record(self) -> dict:
        return _clean({
            "experiment": self.experiment,
            "seed": int(self.seed),
            "config": self.config,
            "scalars": self.scalars,
            "columns": list(self.columns),
            "rows": [{c: r.get(c) for c in self.columns} for r in self.rows],
            "verdicts": {k: bool(v) for k, v in self.verdicts.items()},
            "passed": self.passed,
            "notes": list(self.notes),
            "timestamp": self.timestamp,
        })

    @classmethod
    def from_record(cls, rec: dict) -> "ExperimentReport":
        return cls(
            experiment=rec["experiment"], config=rec["config"], seed=rec["seed"],
            scalars=rec["scalars"], columns=list(rec["columns"]), rows=list(rec["rows"]),
            verdicts=dict(rec["verdicts"]), notes=list(rec.get("notes", [])),
            timestamp=dict(rec.get("timestamp", {})),
        )


def to_json(report: ExperimentReport) -> str:
    return json.dumps(report.to_record(), indent=2) + "\n"


def to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=report.columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in report.to_record()["rows"]:
        writer.writerow(row)
    return buf.getvalue()


def emit_report(report: ExperimentReport, format: str, path: str) -> None:
    """Write ``report`` as ``csv`` (the row table) or ``json`` (the full record)."""
    if format == "json":
        text = to_json(report)
    elif format == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown format {format!r}; expected csv or json")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_report(path: str) -> ExperimentReport:
    with open(path, encoding="utf-8") as fh:
        return ExperimentReport.from_record(json.load(fh))
