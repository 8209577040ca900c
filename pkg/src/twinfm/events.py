"""Append-only event log: the persistence substrate for the twin.

Wire format (schema v1, see schemas/event-log-v1.schema.json): UTF-8, one
JSON object per line with exactly the fields {seq, at, kind, payload}.
Serialization is canonical (sorted keys, compact separators) so identical
state always produces identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorruptLog, GapInSequence, UnknownEventKind
from .model import iso, parse_iso

SCHEMA_VERSION = 1

EVENT_KINDS = frozenset({
    "space_upserted",
    "equipment_upserted",
    "doc_attached",
    "sensor_bound",
    "reading_ingested",
    "alarm_raised",
    "alarm_acked",
    "alarm_cleared",
    "policy_created",
    "job_created",
    "job_transitioned",
    "comment_added",
})


def canonical_json(obj) -> str:
    """Deterministic JSON encoding used for events, snapshots and idempotence
    comparisons."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class TwinEvent:
    seq: int
    at: datetime
    kind: str
    payload: dict

    def to_line(self) -> str:
        return canonical_json({
            "seq": self.seq,
            "at": iso(self.at),
            "kind": self.kind,
            "payload": self.payload,
        })


def event_from_dict(d: dict) -> TwinEvent:
    kind = d.get("kind")
    if kind not in EVENT_KINDS:
        raise UnknownEventKind(f"unknown event kind: {kind!r}")
    return TwinEvent(seq=int(d["seq"]), at=parse_iso(d["at"]), kind=kind, payload=d["payload"])


def parse_event_line(line: str) -> TwinEvent:
    try:
        d = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptLog(f"unparseable event line: {exc}") from exc
    if not isinstance(d, dict) or not {"seq", "at", "kind", "payload"} <= set(d):
        raise CorruptLog(f"event line missing required fields: {line[:80]!r}")
    return event_from_dict(d)


def read_event_log(path: str | Path) -> list[TwinEvent]:
    """Read and sequence-check a full log file."""
    events = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(parse_event_line(line))
    check_sequence(events)
    return events


def check_sequence(events: Iterable[TwinEvent], start_seq: int = 1) -> None:
    """Require seq to run start_seq, start_seq+1, ... with no gaps."""
    expected = start_seq
    for ev in events:
        if ev.seq != expected:
            raise GapInSequence(f"expected seq {expected}, got {ev.seq}")
        expected += 1


class EventLogWriter:
    """Flushing line-per-event appender.  A store owns at most one writer."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a", encoding="utf-8")

    def append(self, event: TwinEvent) -> None:
        self._fh.write(event.to_line() + "\n")
        self._fh.flush()

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()


def iter_log_lines(path: str | Path) -> Iterator[str]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield line.rstrip("\n")
