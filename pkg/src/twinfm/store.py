"""Event-sourced authoritative store for the twin.

All state lives in one TwinStore rebuilt deterministically by replaying the
event log; every mutation serializes through the single commit path (one
lock), appends exactly one event line, then applies it to in-memory state.
Reads never mutate.  Replaying the emitted log reproduces a bit-identical
snapshot.
"""

from __future__ import annotations

import logging
import re
import threading
from datetime import datetime
from pathlib import Path
from typing import Callable, Optional

from . import alarms as alarm_engine
from .errors import (
    DuplicateTagConflict,
    MalformedCategory,
    MalformedCode,
    UnknownEquipment,
    UnknownEventKind,
    UnknownSpace,
)
from .events import EventLogWriter, TwinEvent, canonical_json, read_event_log
from .model import (
    AlarmRecord,
    AlarmRule,
    AlarmState,
    Discipline,
    DocumentMeta,
    EquipmentItem,
    JobComment,
    MaintenanceJob,
    MaintenancePolicy,
    SensorReading,
    SensorSpec,
    SpaceRecord,
    enum_values,
    iso,
    parse_iso,
    utcnow,
)
from .omniclass import canonical, require_table

logger = logging.getLogger(__name__)

SNAPSHOT_SCHEMA_VERSION = 1

_PENDING_FMT = "~{:06d}"


def _next_numeric_id(prefix: str, width: int, existing) -> str:
    """Next id of the form PREFIX-00001 given ids already in use."""
    pat = re.compile(rf"^{re.escape(prefix)}-(\d{{{width}}})$")
    top = 0
    for eid in existing:
        m = pat.match(eid)
        if m:
            top = max(top, int(m.group(1)))
    return f"{prefix}-{top + 1:0{width}d}"


class TwinStore:
    """Spaces, equipment, sensors, documents plus the operational state that
    rides on the same event log (readings, alarms, policies, jobs)."""

    def __init__(self, log_path: str | Path | None = None,
                 clock: Callable[[], datetime] = utcnow):
        self.clock = clock
        self.lock = threading.RLock()

        self.spaces: dict[str, SpaceRecord] = {}
        self.equipment: dict[str, EquipmentItem] = {}
        self.sensors: dict[str, SensorSpec] = {}
        self.documents: dict[str, DocumentMeta] = {}
        self.rules: dict[str, AlarmRule] = {}
        self.readings: dict[str, list[SensorReading]] = {}
        self.alarms: dict[str, AlarmRecord] = {}
        self.policies: dict[str, MaintenancePolicy] = {}
        self.jobs: dict[str, MaintenanceJob] = {}

        self.last_seq = 0
        self.events: list[TwinEvent] = []
        self._equip_ordinals: dict[str, int] = {}
        self._next_ordinal = 1
        self._rule_states: dict[str, alarm_engine.RuleState] = {}
        self._active_alarm_by_sensor: dict[str, str] = {}
        self._preventive_keys: set[tuple[str, str, str]] = set()
        self._last_alarm_action: Optional[tuple[str, str]] = None
        self._commit_hooks: list[Callable[[TwinEvent], None]] = []

        self._writer = EventLogWriter(log_path) if log_path is not None else None

    # ------------------------------------------------------------------ setup

    @classmethod
    def open(cls, log_path: str | Path, clock: Callable[[], datetime] = utcnow) -> "TwinStore":
        """Replay an existing log (if any) and attach for appending."""
        store = cls(clock=clock)
        path = Path(log_path)
        if path.exists():
            for ev in read_event_log(path):
                store._advance(ev)
        store._writer = EventLogWriter(path)
        return store

    def close(self) -> None:
        if self._writer is not None:
            self._writer.close()

    def add_commit_hook(self, hook: Callable[[TwinEvent], None]) -> None:
        """Hooks run after each committed event (used for live streaming)."""
        self._commit_hooks.append(hook)

    # ----------------------------------------------------------------- commit

    def commit(self, kind: str, payload: dict, at: datetime | None = None) -> TwinEvent:
        """The single-writer commit path: sequence, persist, apply."""
        with self.lock:
            ev = TwinEvent(seq=self.last_seq + 1, at=at or self.clock(),
                           kind=kind, payload=payload)
            if self._writer is not None:
                self._writer.append(ev)
            self._advance(ev)
            for hook in self._commit_hooks:
                hook(ev)
            return ev

    def _advance(self, ev: TwinEvent) -> None:
        self._apply(ev)
        self.last_seq = ev.seq
        self.events.append(ev)

    # --------------------------------------------------------------- replay

    @classmethod
    def replay(cls, events, clock: Callable[[], datetime] = utcnow) -> "TwinStore":
        """Rebuild a store from an ordered event list (seq must run 1..n)."""
        store = cls(clock=clock)
        expected = 1
        for ev in events:
            if ev.seq != expected:
                from .errors import GapInSequence
                raise GapInSequence(f"expected seq {expected}, got {ev.seq}")
            store._advance(ev)
            expected += 1
        return store

    # ------------------------------------------------------------ operations

    def upsert_space(self, record: SpaceRecord, overwrite: bool = False) -> str:
        try:
            require_table(record.room_category, 13)
        except MalformedCode as exc:
            raise MalformedCategory(str(exc)) from exc
        if not record.room_tag:
            raise MalformedCategory("room_tag must be non-empty")
        with self.lock:
            existing = self.spaces.get(record.room_tag)
            if existing is not None:
                if canonical_json(existing.to_payload()) == canonical_json(record.to_payload()):
                    return record.room_tag
                if not overwrite:
                    raise DuplicateTagConflict(
                        f"room_tag {record.room_tag!r} already stored with different data")
            self.commit("space_upserted", {"record": record.to_payload()})
            return record.room_tag

    def upsert_equipment(self, record: EquipmentItem, ordinal: int | None = None) -> str:
        """Store one item.  ``ordinal`` pins ingest order when an id
        assignment replaces a previously pending (id-less) entry."""
        require_table(record.omniclass_system, 23)
        require_table(record.omniclass_type, 23)
        if record.space_instance not in self.spaces:
            raise UnknownSpace(f"space_instance {record.space_instance!r} not in graph")
        if record.discipline and record.discipline not in enum_values(Discipline):
            raise ValueError(f"invalid discipline {record.discipline!r}")
        with self.lock:
            key = record.augment_id_instance
            if key:
                existing = self.equipment.get(key)
                if existing is not None and canonical_json(existing.to_payload()) == canonical_json(record.to_payload()):
                    return key
                if ordinal is None:
                    ordinal = self._equip_ordinals.get(key, self._next_ordinal)
            elif ordinal is None:
                ordinal = self._next_ordinal
            self.commit("equipment_upserted",
                        {"record": record.to_payload(), "ordinal": ordinal})
            return record.augment_id_instance

    def attach_document(self, equipment_id: str, meta: DocumentMeta) -> str:
        with self.lock:
            if equipment_id not in self.equipment:
                raise UnknownEquipment(f"no equipment {equipment_id!r}")
            if not meta.doc_id:
                meta.doc_id = _next_numeric_id("DOC", 5, self.documents)
            if meta.uploaded_at is None:
                meta.uploaded_at = self.clock()
            existing = self.documents.get(meta.doc_id)
            if (existing is not None
                    and canonical_json(existing.to_payload()) == canonical_json(meta.to_payload())
                    and meta.doc_id in self.equipment[equipment_id].document_ids):
                return meta.doc_id
            self.commit("doc_attached",
                        {"equipment_id": equipment_id, "record": meta.to_payload()})
            return meta.doc_id

    def documents_for(self, equipment_id: str) -> list[DocumentMeta]:
        if equipment_id not in self.equipment:
            raise UnknownEquipment(f"no equipment {equipment_id!r}")
        return [self.documents[d] for d in self.equipment[equipment_id].document_ids]

    # --------------------------------------------------------------- queries

    def query(self, selector: str, value: str = "") -> list[EquipmentItem]:
        """Read-only equipment lookup with a stable ordering."""
        if selector == "by_room_tag":
            hits = [e for e in self.equipment.values() if e.space_instance == value]
        elif selector == "by_discipline":
            hits = [e for e in self.equipment.values() if e.discipline == value]
        elif selector == "by_omniclass_prefix":
            hits = [e for e in self.equipment.values()
                    if canonical(e.omniclass_type).startswith(value)]
        elif selector == "by_augment_id":
            hits = [e for e in self.equipment.values()
                    if e.augment_id_instance == value or e.augment_id_type == value]
        else:
            from .errors import BadFilter
            raise BadFilter(f"unknown selector {selector!r}")
        return sorted(hits, key=lambda e: (e.augment_id_instance, e.space_instance))

    def equipment_list(self) -> list[EquipmentItem]:
        return sorted(self.equipment.values(),
                      key=lambda e: (e.augment_id_instance, e.space_instance))

    def space_list(self) -> list[SpaceRecord]:
        return sorted(self.spaces.values(), key=lambda s: s.room_tag)

    def pending_equipment(self) -> list[tuple[int, str]]:
        """(ordinal, map key) of items still lacking an instance id."""
        return sorted((self._equip_ordinals[k], k)
                      for k, e in self.equipment.items() if not e.augment_id_instance)

    def equipment_ordinal(self, key: str) -> int:
        return self._equip_ordinals[key]

    def sensors_for_equipment(self, equipment_id: str) -> dict[str, SensorSpec]:
        if equipment_id not in self.equipment:
            raise UnknownEquipment(f"no equipment {equipment_id!r}")
        return {s.kind: s for s in self.sensors.values()
                if s.bound_equipment == equipment_id}

    def equipment_for_sensor(self, sensor_id: str) -> str:
        from .errors import UnboundSensor
        spec = self.sensors.get(sensor_id)
        if spec is None:
            raise UnboundSensor(f"no sensor {sensor_id!r}")
        return spec.bound_equipment

    def rule_state(self, sensor_id: str) -> alarm_engine.RuleState:
        return self._rule_states.get(sensor_id, alarm_engine.RuleState())

    def active_alarm_id(self, sensor_id: str) -> Optional[str]:
        return self._active_alarm_by_sensor.get(sensor_id)

    def preventive_key_exists(self, policy_id: str, occurrence: str, target: str) -> bool:
        return (policy_id, occurrence, target) in self._preventive_keys

    # --------------------------------------------------------- reading commit

    def commit_reading(self, reading: SensorReading) -> list[TwinEvent]:
        """Commit a validated reading; cascade alarm raise/clear events the
        evaluator derives from it.  Returns all appended events."""
        with self.lock:
            events = [self.commit("reading_ingested",
                                  {"reading": reading.to_payload()}, at=reading.at)]
            action = self._last_alarm_action
            self._last_alarm_action = None
            if action is not None:
                what, sensor_id = action
                if what == "raise":
                    alarm_id = _next_numeric_id("AL", 5, self.alarms)
                    events.append(self.commit("alarm_raised", {"alarm": {
                        "alarm_id": alarm_id,
                        "sensor_id": sensor_id,
                        "raised_at": iso(reading.at),
                        "trigger_value": reading.value,
                    }}, at=reading.at))
                elif what == "clear":
                    alarm_id = self._active_alarm_by_sensor[sensor_id]
                    events.append(self.commit("alarm_cleared", {
                        "alarm_id": alarm_id, "at": iso(reading.at),
                    }, at=reading.at))
            return events

    # ----------------------------------------------------------------- apply

    def _apply(self, ev: TwinEvent) -> None:
        handler = getattr(self, f"_apply_{ev.kind}", None)
        if handler is None:
            raise UnknownEventKind(f"unknown event kind: {ev.kind!r}")
        handler(ev)

    def _apply_space_upserted(self, ev: TwinEvent) -> None:
        rec = SpaceRecord.from_payload(ev.payload["record"])
        self.spaces[rec.room_tag] = rec

    def _apply_equipment_upserted(self, ev: TwinEvent) -> None:
        rec = EquipmentItem.from_payload(ev.payload["record"])
        ordinal = ev.payload["ordinal"]
        key = rec.augment_id_instance or _PENDING_FMT.format(ordinal)
        # an id assignment replaces the pending entry created at ingest
        if rec.augment_id_instance:
            stale = _PENDING_FMT.format(ordinal)
            if stale in self.equipment:
                del self.equipment[stale]
                del self._equip_ordinals[stale]
        self.equipment[key] = rec
        self._equip_ordinals[key] = ordinal
        self._next_ordinal = max(self._next_ordinal, ordinal + 1)

    def _apply_doc_attached(self, ev: TwinEvent) -> None:
        meta = DocumentMeta.from_payload(ev.payload["record"])
        self.documents[meta.doc_id] = meta
        item = self.equipment[ev.payload["equipment_id"]]
        if meta.doc_id not in item.document_ids:
            item.document_ids.append(meta.doc_id)

    def _apply_sensor_bound(self, ev: TwinEvent) -> None:
        spec = SensorSpec.from_payload(ev.payload["spec"])
        self.sensors[spec.sensor_id] = spec
        self.readings.setdefault(spec.sensor_id, [])
        rule = ev.payload.get("rule")
        if rule is not None:
            self.rules[spec.sensor_id] = AlarmRule.from_payload(rule)
        self._rule_states.setdefault(spec.sensor_id, alarm_engine.RuleState())

    def _apply_reading_ingested(self, ev: TwinEvent) -> None:
        reading = SensorReading.from_payload(ev.payload["reading"])
        self.readings.setdefault(reading.sensor_id, []).append(reading)
        rule = self.rules.get(reading.sensor_id)
        self._last_alarm_action = None
        if rule is not None:
            state = self._rule_states.get(reading.sensor_id, alarm_engine.RuleState())
            active = reading.sensor_id in self._active_alarm_by_sensor
            action, new_state = alarm_engine.step(rule, state, reading.value, active)
            self._rule_states[reading.sensor_id] = new_state
            if action is not None:
                self._last_alarm_action = (action, reading.sensor_id)

    def _apply_alarm_raised(self, ev: TwinEvent) -> None:
        a = ev.payload["alarm"]
        rec = AlarmRecord(
            alarm_id=a["alarm_id"], sensor_id=a["sensor_id"],
            state=AlarmState.RAISED.value, raised_at=parse_iso(a["raised_at"]),
            trigger_value=a["trigger_value"])
        self.alarms[rec.alarm_id] = rec
        self._active_alarm_by_sensor[rec.sensor_id] = rec.alarm_id

    def _apply_alarm_acked(self, ev: TwinEvent) -> None:
        rec = self.alarms[ev.payload["alarm_id"]]
        rec.state = AlarmState.ACKNOWLEDGED.value
        rec.acked_at = parse_iso(ev.payload["at"])
        rec.actor = ev.payload["actor"]

    def _apply_alarm_cleared(self, ev: TwinEvent) -> None:
        rec = self.alarms[ev.payload["alarm_id"]]
        rec.state = AlarmState.CLEARED.value
        rec.cleared_at = parse_iso(ev.payload["at"])
        self._active_alarm_by_sensor.pop(rec.sensor_id, None)

    def _apply_policy_created(self, ev: TwinEvent) -> None:
        pol = MaintenancePolicy.from_payload(ev.payload["policy"])
        self.policies[pol.policy_id] = pol

    def _apply_job_created(self, ev: TwinEvent) -> None:
        job = MaintenanceJob.from_payload(ev.payload["job"])
        self.jobs[job.job_id] = job
        if job.origin == "preventive" and job.policy_id and job.occurrence_date:
            self._preventive_keys.add(
                (job.policy_id, job.occurrence_date.isoformat(), job.target))

    def _apply_job_transitioned(self, ev: TwinEvent) -> None:
        job = self.jobs[ev.payload["job_id"]]
        job.status = ev.payload["to_status"]
        if ev.payload["to_status"] == "ongoing" and ev.payload.get("actor"):
            job.assignee = ev.payload["actor"]
        comment = ev.payload.get("comment")
        if comment:
            job.comments.append(JobComment(
                at=parse_iso(ev.payload["at"]), actor=ev.payload["actor"], text=comment))

    def _apply_comment_added(self, ev: TwinEvent) -> None:
        job = self.jobs[ev.payload["job_id"]]
        job.comments.append(JobComment.from_payload(ev.payload["comment"]))

    # -------------------------------------------------------------- snapshot

    def snapshot(self) -> dict:
        with self.lock:
            return {
                "schema_version": SNAPSHOT_SCHEMA_VERSION,
                "last_seq": self.last_seq,
                "next_equipment_ordinal": self._next_ordinal,
                "spaces": {k: v.to_payload() for k, v in self.spaces.items()},
                "equipment": {k: {"record": v.to_payload(),
                                  "ordinal": self._equip_ordinals[k]}
                              for k, v in self.equipment.items()},
                "sensors": {k: v.to_payload() for k, v in self.sensors.items()},
                "documents": {k: v.to_payload() for k, v in self.documents.items()},
                "rules": {k: v.to_payload() for k, v in self.rules.items()},
                "rule_states": {k: {"streak_out": s.streak_out, "streak_in": s.streak_in}
                                for k, s in self._rule_states.items()},
                "active_alarm_by_sensor": dict(self._active_alarm_by_sensor),
                "readings": {k: [r.to_payload() for r in v]
                             for k, v in self.readings.items()},
                "alarms": {k: v.to_payload() for k, v in self.alarms.items()},
                "policies": {k: v.to_payload() for k, v in self.policies.items()},
                "jobs": {k: v.to_payload() for k, v in self.jobs.items()},
                "preventive_keys": sorted(list(k) for k in self._preventive_keys),
            }

    def snapshot_json(self) -> str:
        return canonical_json(self.snapshot())

    @classmethod
    def from_snapshot(cls, snap: dict, clock: Callable[[], datetime] = utcnow) -> "TwinStore":
        store = cls(clock=clock)
        store.last_seq = snap["last_seq"]
        store._next_ordinal = snap["next_equipment_ordinal"]
        store.spaces = {k: SpaceRecord.from_payload(v) for k, v in snap["spaces"].items()}
        for k, entry in snap["equipment"].items():
            store.equipment[k] = EquipmentItem.from_payload(entry["record"])
            store._equip_ordinals[k] = entry["ordinal"]
        store.sensors = {k: SensorSpec.from_payload(v) for k, v in snap["sensors"].items()}
        store.documents = {k: DocumentMeta.from_payload(v) for k, v in snap["documents"].items()}
        store.rules = {k: AlarmRule.from_payload(v) for k, v in snap["rules"].items()}
        store._rule_states = {k: alarm_engine.RuleState(**v)
                              for k, v in snap["rule_states"].items()}
        store._active_alarm_by_sensor = dict(snap["active_alarm_by_sensor"])
        store.readings = {k: [SensorReading.from_payload(r) for r in v]
                          for k, v in snap["readings"].items()}
        store.alarms = {k: AlarmRecord.from_payload(v) for k, v in snap["alarms"].items()}
        store.policies = {k: MaintenancePolicy.from_payload(v)
                          for k, v in snap["policies"].items()}
        store.jobs = {k: MaintenanceJob.from_payload(v) for k, v in snap["jobs"].items()}
        store._preventive_keys = {tuple(k) for k in snap["preventive_keys"]}
        return store

    def resume(self, events) -> None:
        """Apply a tail of events on top of snapshot state (seq must continue
        from last_seq+1)."""
        from .errors import GapInSequence
        expected = self.last_seq + 1
        for ev in events:
            if ev.seq != expected:
                raise GapInSequence(f"expected seq {expected}, got {ev.seq}")
            self._advance(ev)
            expected += 1
