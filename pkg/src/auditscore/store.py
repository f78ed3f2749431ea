"""Append-only history of composite assessments, one JSON record per line.

A flat line-delimited file keeps the history diffable and dependency-free
at desk scale. Reads are lenient: corrupt or torn lines (including a
partial final line from an interrupted write) are skipped and counted,
never mis-parsed. Single-writer contract; concurrent readers are fine,
cross-process locking is out of scope.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import AuditError, StoreError
from .model import CompositeAssessment, assessment_from_dict, assessment_to_dict

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class HistoryRecord:
    assessment: CompositeAssessment
    host_label: str
    schema_version: int = SCHEMA_VERSION


@dataclass
class HistoryLoad:
    """Records in file order plus the number of skipped (corrupt) lines."""

    records: list[HistoryRecord] = field(default_factory=list)
    skipped: int = 0


def record_to_json(record: HistoryRecord) -> str:
    """One-line JSON form; floats keep full precision via repr round-trip."""
    payload = {
        "schema_version": record.schema_version,
        "host_label": record.host_label,
        "assessment": assessment_to_dict(record.assessment),
    }
    return json.dumps(payload, separators=(",", ":"))


def record_from_json(line: str) -> HistoryRecord:
    payload = json.loads(line)
    version = payload["schema_version"]
    if not isinstance(version, int) or version > SCHEMA_VERSION:
        raise StoreError(
            "SCHEMA_TOO_NEW", f"record schema_version {version!r} > {SCHEMA_VERSION}"
        )
    return HistoryRecord(
        assessment=assessment_from_dict(payload["assessment"]),
        host_label=payload["host_label"],
        schema_version=version,
    )


def append_record(path: Path | str, record: HistoryRecord) -> None:
    """Append one record as a single flushed line; prior lines untouched."""
    try:
        line = record_to_json(record)
    except (TypeError, ValueError) as exc:
        raise StoreError("SERIALIZATION_FAILURE", str(exc)) from exc
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8") as handle:
            handle.write(line + "\n")
            handle.flush()
            os.fsync(handle.fileno())
    except OSError as exc:
        raise StoreError("IO_FAILURE", f"cannot append to {path}: {exc}") from exc


def load_history(path: Path | str, host_filter: str | None = None) -> HistoryLoad:
    """Read records in file order, optionally filtered by host label.

    Corrupt lines are skipped and counted in ``skipped``; an empty file
    yields an empty result.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StoreError("IO_FAILURE", f"cannot read {path}: {exc}") from exc
    result = HistoryLoad()
    for line in text.splitlines():
        if not line.strip():
            continue
        try:
            record = record_from_json(line)
        except (ValueError, KeyError, TypeError, AuditError):
            result.skipped += 1
            continue
        if host_filter is None or record.host_label == host_filter:
            result.records.append(record)
    return result
