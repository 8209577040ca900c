"""Read-only analytics over the committed event stream.

All window semantics are half-open [from, to): an event at exactly `to` is
outside.  "As of" status means folding every job event strictly before `to`.
Dashboard buckets align to epoch multiples of the bucket size; empty buckets
report value null (absence of data, not zero).
"""

from __future__ import annotations

import json
import logging
from datetime import datetime
from importlib import resources
from pathlib import Path

from .errors import InvertedWindow, UnknownMetric, UnknownSystem
from .model import JobStatus, epoch_s, from_epoch_s, iso
from .omniclass import canonical
from .store import TwinStore

logger = logging.getLogger(__name__)

DASHBOARD_SYSTEMS = (
    "ahu", "drinking_fountain", "electrical_panel", "elevator", "generator",
    "lighting", "temperature", "transformer", "water_closet", "water_pressure",
)

AGG_MODES = ("mean", "sum", "last", "max")


def load_registry(path: str | Path | None = None) -> dict:
    """The static dashboard registry: system -> equipment selector + metrics."""
    if path is None:
        text = resources.files("twinfm").joinpath(
            "config/metric_registry.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def check_window(from_at: datetime, to_at: datetime) -> None:
    if not from_at < to_at:
        raise InvertedWindow(f"window [{iso(from_at)}, {iso(to_at)}) is inverted")


def _in_window(at: datetime, from_at: datetime, to_at: datetime) -> bool:
    return from_at <= at < to_at


def _job_facts(store: TwinStore, to_at: datetime) -> dict[str, dict]:
    """Fold job events before `to_at`: status, created_at, first completion."""
    facts: dict[str, dict] = {}
    for ev in store.events:
        if ev.at >= to_at:
            continue
        if ev.kind == "job_created":
            job = ev.payload["job"]
            facts[job["job_id"]] = {
                "status": job["status"],
                "origin": job["origin"],
                "target": job["target"],
                "target_kind": job["target_kind"],
                "created_at": ev.at,
                "first_completed_at": None,
            }
        elif ev.kind == "job_transitioned":
            fact = facts.get(ev.payload["job_id"])
            if fact is None:
                continue
            fact["status"] = ev.payload["to_status"]
            if (ev.payload["to_status"] == JobStatus.COMPLETED.value
                    and fact["first_completed_at"] is None):
                fact["first_completed_at"] = ev.at
    return facts


def maintenance_summary(store: TwinStore, from_at: datetime, to_at: datetime) -> dict:
    """Job counts over the window plus mean open-to-completed hours."""
    check_window(from_at, to_at)
    facts = _job_facts(store, to_at)

    touched: set[str] = set()
    for ev in store.events:
        if not _in_window(ev.at, from_at, to_at):
            continue
        if ev.kind == "job_created":
            touched.add(ev.payload["job"]["job_id"])
        elif ev.kind == "job_transitioned":
            touched.add(ev.payload["job_id"])

    by_status = {s.value: 0 for s in JobStatus}
    by_origin: dict[str, int] = {}
    by_discipline: dict[str, int] = {}
    for job_id in touched:
        fact = facts[job_id]
        by_status[fact["status"]] += 1
        by_origin[fact["origin"]] = by_origin.get(fact["origin"], 0) + 1
        if fact["target_kind"] == "room":
            bucket = "space"
        else:
            item = store.equipment.get(fact["target"])
            bucket = (item.discipline or "unknown") if item is not None else "unknown"
        by_discipline[bucket] = by_discipline.get(bucket, 0) + 1

    durations = []
    for fact in facts.values():
        done = fact["first_completed_at"]
        if done is not None and _in_window(done, from_at, to_at):
            durations.append((done - fact["created_at"]).total_seconds() / 3600.0)
    mean_hours = sum(durations) / len(durations) if durations else None

    return {
        "jobs_in_window": len(touched),
        "by_status": by_status,
        "by_origin": dict(sorted(by_origin.items())),
        "by_discipline": dict(sorted(by_discipline.items())),
        "mean_hours_open_to_completed": mean_hours,
    }


def equipment_health(store: TwinStore, from_at: datetime, to_at: datetime) -> dict:
    """Per-equipment alarm, out-of-range, and open-job indicators."""
    check_window(from_at, to_at)
    facts = _job_facts(store, to_at)

    open_jobs: dict[str, int] = {}
    for fact in facts.values():
        if fact["target_kind"] != "room" and fact["status"] in (
                JobStatus.OPEN.value, JobStatus.ONGOING.value):
            open_jobs[fact["target"]] = open_jobs.get(fact["target"], 0) + 1

    sensors_by_equipment: dict[str, list] = {}
    for spec in store.sensors.values():
        sensors_by_equipment.setdefault(spec.bound_equipment, []).append(spec)

    out: dict[str, dict] = {}
    for key in sorted(store.equipment):
        total = 0
        outside = 0
        alarm_count = 0
        for spec in sensors_by_equipment.get(key, ()):
            rule = store.rules.get(spec.sensor_id)
            low, high = (rule.low, rule.high) if rule is not None else (spec.low, spec.high)
            for reading in store.readings.get(spec.sensor_id, ()):
                if _in_window(reading.at, from_at, to_at):
                    total += 1
                    if not low <= reading.value <= high:
                        outside += 1
            for alarm in store.alarms.values():
                if (alarm.sensor_id == spec.sensor_id
                        and _in_window(alarm.raised_at, from_at, to_at)
                        and (alarm.cleared_at is None or alarm.cleared_at >= to_at)):
                    alarm_count += 1
        out[key] = {
            "active_alarm_count": alarm_count,
            "readings_out_of_range_fraction": (outside / total) if total else None,
            "open_job_count": open_jobs.get(key, 0),
        }
    return out


def staff_activity(store: TwinStore, from_at: datetime, to_at: datetime) -> dict:
    """Per-actor transition, comment, and completion tallies."""
    check_window(from_at, to_at)
    tally: dict[str, dict] = {}

    def entry(actor: str) -> dict:
        return tally.setdefault(actor, {
            "transitions_performed": 0, "comments_added": 0, "jobs_completed": 0})

    for ev in store.events:
        if not _in_window(ev.at, from_at, to_at):
            continue
        if ev.kind == "job_transitioned":
            actor = ev.payload.get("actor") or ""
            row = entry(actor)
            row["transitions_performed"] += 1
            if ev.payload.get("comment"):
                row["comments_added"] += 1
            if (ev.payload["from_status"] == JobStatus.ONGOING.value
                    and ev.payload["to_status"] == JobStatus.COMPLETED.value):
                row["jobs_completed"] += 1
        elif ev.kind == "comment_added":
            entry(ev.payload["comment"]["actor"])["comments_added"] += 1
    return dict(sorted(tally.items()))


# -------------------------------------------------------------- dashboards

def _aggregate(values: list[float], agg: str) -> float:
    if agg == "mean":
        return sum(values) / len(values)
    if agg == "sum":
        return sum(values)
    if agg == "last":
        return values[-1]
    if agg == "max":
        return max(values)
    raise ValueError(f"unknown aggregation {agg!r}")


def dashboard_series(store: TwinStore, registry: dict, system: str, metric: str,
                     from_at: datetime, to_at: datetime, bucket_s: int) -> dict:
    """One bucketed series for a registered (system, metric) pair."""
    entry = registry.get(system)
    if entry is None:
        raise UnknownSystem(f"{system!r} is not one of the dashboard systems")
    mspec = entry["metrics"].get(metric)
    if mspec is None:
        raise UnknownMetric(f"{system} has no metric {metric!r}")
    check_window(from_at, to_at)
    span = epoch_s(to_at) - epoch_s(from_at)
    if bucket_s <= 0 or bucket_s > span:
        raise InvertedWindow(f"bucket {bucket_s}s must be in (0, {span}] seconds")

    prefix = entry["equipment_prefix"]
    eq_ids = set()
    for item in store.equipment.values():
        if not item.augment_id_instance:
            continue
        try:
            code = canonical(item.omniclass_type)
        except Exception:
            continue
        if code.startswith(prefix):
            eq_ids.add(item.augment_id_instance)

    stream: list[tuple[datetime, str, int, float]] = []
    for sensor_id in sorted(store.sensors):
        spec = store.sensors[sensor_id]
        if spec.bound_equipment in eq_ids and spec.kind == mspec["kind"]:
            for n, reading in enumerate(store.readings.get(sensor_id, ())):
                if _in_window(reading.at, from_at, to_at):
                    stream.append((reading.at, sensor_id, n, reading.value))
    stream.sort(key=lambda r: (r[0], r[1], r[2]))

    b0 = (epoch_s(from_at) // bucket_s) * bucket_s
    starts = list(range(b0, epoch_s(to_at), bucket_s))
    buckets: dict[int, list[float]] = {s: [] for s in starts}
    for at, _sid, _n, value in stream:
        buckets[(epoch_s(at) // bucket_s) * bucket_s].append(value)

    points = []
    for start in starts:
        values = buckets[start]
        points.append({
            "bucket_start": iso(from_epoch_s(start)),
            "value": _aggregate(values, mspec["agg"]) if values else None,
            "sample_count": len(values),
        })
    return {
        "system": system,
        "metric": metric,
        "kind": mspec["kind"],
        "agg": mspec["agg"],
        "unit": mspec.get("unit", ""),
        "points": points,
    }


def dashboard_all_series(store: TwinStore, registry: dict, system: str,
                         from_at: datetime, to_at: datetime, bucket_s: int) -> list[dict]:
    entry = registry.get(system)
    if entry is None:
        raise UnknownSystem(f"{system!r} is not one of the dashboard systems")
    return [dashboard_series(store, registry, system, metric, from_at, to_at, bucket_s)
            for metric in entry["metrics"]]


def composite_report(store: TwinStore, from_at: datetime, to_at: datetime) -> dict:
    """Everything the report CLI prints: one dict, JSON- and CSV-friendly."""
    return {
        "window": {"from": iso(from_at), "to": iso(to_at)},
        "maintenance": maintenance_summary(store, from_at, to_at),
        "equipment_health": equipment_health(store, from_at, to_at),
        "staff": staff_activity(store, from_at, to_at),
    }
