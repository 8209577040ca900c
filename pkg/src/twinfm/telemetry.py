"""Sensor binding, reading ingestion, and deterministic fleet simulation.

Simulated values come from a counter-based generator keyed on
(seed, sensor_id, timestamp): no generator state is carried between samples,
so any subset of the stream can be recomputed independently and two runs
with the same seed produce byte-identical event logs.

Live readings arrive on MQTT-style topics ``twin/<building>/<augment_id>/<kind>``
with a JSON payload ``{"at": ..., "value": ..., "unit": ...}``; a plain-TCP
line listener (``<topic> <json>\\n``) stands in for a broker.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import socketserver
import threading
from datetime import datetime

from .errors import (
    BindingConflict,
    IntervalOutOfRange,
    MalformedPayload,
    NoSensors,
    OffGridTimestamp,
    UnboundSensor,
    UnitMismatch,
    UnknownEquipment,
)
from .events import TwinEvent, canonical_json
from .model import (
    INTERVAL_MAX_S,
    INTERVAL_MIN_S,
    AlarmRule,
    ReadingSource,
    SensorKind,
    SensorReading,
    SensorSpec,
    epoch_s,
    from_epoch_s,
    parse_iso,
)
from .store import TwinStore, _next_numeric_id

logger = logging.getLogger(__name__)

DEFAULT_OCCUPANCY_SCHEDULE = {
    "occupied_start_hour": 8,
    "occupied_end_hour": 18,
    "occupied_probability": 0.8,
    "vacant_probability": 0.05,
}


# ---------------------------------------------------------------- binding

def bind_sensor(store: TwinStore, equipment_id: str, spec: SensorSpec,
                rule: AlarmRule | None = None) -> str:
    """Register a sensor on an equipment item (idempotent for identical
    spec+rule).  At most one sensor per (equipment, kind)."""
    if equipment_id not in store.equipment:
        raise UnknownEquipment(f"no equipment {equipment_id!r}")
    if not INTERVAL_MIN_S <= spec.interval_s <= INTERVAL_MAX_S:
        raise IntervalOutOfRange(
            f"interval_s {spec.interval_s} outside [{INTERVAL_MIN_S}, {INTERVAL_MAX_S}]")
    if not spec.low < spec.high:
        raise MalformedPayload(f"normal_range low {spec.low} must be < high {spec.high}")
    if spec.kind not in {k.value for k in SensorKind}:
        raise MalformedPayload(f"unknown sensor kind {spec.kind!r}")
    with store.lock:
        spec.bound_equipment = equipment_id
        if not spec.sensor_id:
            spec.sensor_id = _next_numeric_id("SN", 5, store.sensors)
        for other in store.sensors.values():
            if (other.bound_equipment == equipment_id and other.kind == spec.kind
                    and other.sensor_id != spec.sensor_id):
                raise BindingConflict(
                    f"{equipment_id} already has a {spec.kind} sensor ({other.sensor_id})")
        existing = store.sensors.get(spec.sensor_id)
        if existing is not None:
            same_spec = canonical_json(existing.to_payload()) == canonical_json(spec.to_payload())
            old_rule = store.rules.get(spec.sensor_id)
            same_rule = (old_rule is None and rule is None) or (
                old_rule is not None and rule is not None
                and canonical_json(old_rule.to_payload()) == canonical_json(rule.to_payload()))
            if same_spec and same_rule:
                return spec.sensor_id
        store.commit("sensor_bound", {
            "equipment_id": equipment_id,
            "spec": spec.to_payload(),
            "rule": None if rule is None else rule.to_payload(),
        })
        return spec.sensor_id


# -------------------------------------------------------------- simulation

def _unit_uniforms(seed: int, sensor_id: str, epoch: int) -> tuple[float, float]:
    """Two independent U(0,1) draws from a keyed hash of the coordinates."""
    key = f"{seed}|{sensor_id}|{epoch}".encode()
    digest = hashlib.blake2b(key, digest_size=16).digest()
    a = int.from_bytes(digest[:8], "big")
    b = int.from_bytes(digest[8:], "big")
    u1 = (a + 1) / (2 ** 64 + 1)  # in (0, 1): safe for log()
    u2 = b / 2 ** 64              # in [0, 1)
    return u1, u2


def _standard_normal(seed: int, sensor_id: str, epoch: int) -> float:
    u1, u2 = _unit_uniforms(seed, sensor_id, epoch)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def next_reading(spec: SensorSpec, t: datetime, seed: int) -> SensorReading:
    """The simulated value for one sensor at one grid instant."""
    epoch = epoch_s(t)
    if epoch % spec.interval_s != 0:
        raise OffGridTimestamp(
            f"{t.isoformat()} is not a multiple of {spec.interval_s}s for {spec.sensor_id}")
    seconds_of_day = epoch % 86400
    if spec.kind == SensorKind.OCCUPANCY.value:
        sched = {**DEFAULT_OCCUPANCY_SCHEDULE, **spec.sim_profile}
        hour = seconds_of_day / 3600.0
        occupied = sched["occupied_start_hour"] <= hour < sched["occupied_end_hour"]
        p = sched["occupied_probability"] if occupied else sched["vacant_probability"]
        u1, _ = _unit_uniforms(seed, spec.sensor_id, epoch)
        value = 1.0 if u1 < p else 0.0
    else:
        baseline = float(spec.sim_profile.get("baseline", 0.0))
        amplitude = float(spec.sim_profile.get("diurnal_amplitude", 0.0))
        sigma = float(spec.sim_profile.get("noise_sigma", 0.0))
        value = baseline + amplitude * math.sin(2.0 * math.pi * seconds_of_day / 86400.0)
        if sigma:
            value += sigma * _standard_normal(seed, spec.sensor_id, epoch)
        value = round(value, 4)
    return SensorReading(sensor_id=spec.sensor_id, at=from_epoch_s(epoch),
                         value=value, source=ReadingSource.SIMULATED.value)


def grid_times(spec: SensorSpec, start: datetime, window_s: int) -> list[datetime]:
    """Interval-grid instants within [start, start + window]."""
    begin = epoch_s(start)
    end = begin + window_s
    first = math.ceil(begin / spec.interval_s) * spec.interval_s
    return [from_epoch_s(e) for e in range(first, end + 1, spec.interval_s)]


def run_simulation(store: TwinStore, seed: int, start: datetime,
                   window_s: int, speedup: float | None = None) -> list[TwinEvent]:
    """Simulate every bound sensor across the window and commit the stream.

    Readings are generated per sensor, then committed in (timestamp,
    sensor_id) order so the log is identical regardless of generation order.
    ``speedup`` is accepted for interface parity but batch generation never
    sleeps.
    """
    del speedup
    with store.lock:
        if not store.sensors:
            raise NoSensors("no sensors bound; bind sensors before simulating")
        pending: list[SensorReading] = []
        for sensor_id in sorted(store.sensors):
            spec = store.sensors[sensor_id]
            for t in grid_times(spec, start, window_s):
                pending.append(next_reading(spec, t, seed))
        pending.sort(key=lambda r: (r.at, r.sensor_id))
        committed: list[TwinEvent] = []
        for reading in pending:
            committed.extend(store.commit_reading(reading))
        return committed


# ------------------------------------------------------------------ ingest

def parse_topic(topic: str) -> tuple[str, str, str]:
    parts = topic.split("/")
    if len(parts) != 4 or parts[0] != "twin" or not all(parts):
        raise MalformedPayload(
            f"topic {topic!r} does not match twin/<building>/<augment_id>/<kind>")
    return parts[1], parts[2], parts[3]


def ingest(store: TwinStore, topic: str, payload: bytes | str,
           building_id: str = "") -> SensorReading:
    """Accept one live reading published on a topic."""
    building, augment_id, kind = parse_topic(topic)
    if building_id and building != building_id:
        raise UnboundSensor(f"topic building {building!r} is not served here")
    if isinstance(payload, bytes):
        try:
            payload = payload.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedPayload(f"payload is not UTF-8: {exc}") from exc
    try:
        body = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise MalformedPayload(f"payload is not JSON: {exc}") from exc
    if not isinstance(body, dict) or not {"at", "value", "unit"} <= set(body):
        raise MalformedPayload('payload must carry "at", "value", and "unit"')
    try:
        at = parse_iso(str(body["at"]))
    except ValueError as exc:
        raise MalformedPayload(f"bad timestamp: {exc}") from exc
    if not isinstance(body["value"], (int, float)) or isinstance(body["value"], bool):
        raise MalformedPayload(f"value {body['value']!r} is not a number")
    value = float(body["value"])

    with store.lock:
        spec = None
        for s in store.sensors.values():
            if s.bound_equipment == augment_id and s.kind == kind:
                spec = s
                break
        if spec is None:
            raise UnboundSensor(f"no {kind} sensor bound to {augment_id!r}")
        if str(body["unit"]) != spec.unit:
            raise UnitMismatch(
                f"unit {body['unit']!r} does not match bound unit {spec.unit!r}")
        if spec.kind == SensorKind.OCCUPANCY.value and value not in (0.0, 1.0):
            raise MalformedPayload(f"occupancy value must be 0 or 1, got {value}")
        reading = SensorReading(sensor_id=spec.sensor_id, at=at, value=value,
                                source=ReadingSource.LIVE.value)
        store.commit_reading(reading)
        return reading


def latest(store: TwinStore, equipment_id: str) -> dict[str, SensorReading]:
    """Most recent reading per bound kind (ties go to the last committed)."""
    if equipment_id not in store.equipment:
        raise UnknownEquipment(f"no equipment {equipment_id!r}")
    out: dict[str, SensorReading] = {}
    for spec in store.sensors.values():
        if spec.bound_equipment != equipment_id:
            continue
        best = None
        for reading in store.readings.get(spec.sensor_id, ()):
            if best is None or reading.at >= best.at:
                best = reading
        if best is not None:
            out[spec.kind] = best
    return out


# ------------------------------------------------------------ TCP fallback

class _LineHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            try:
                topic, body = line.split(" ", 1)
                reading = ingest(self.server.store, topic, body,
                                 building_id=self.server.building_id)
                reply = f"ok {reading.sensor_id}\n"
            except ValueError:
                reply = "err MalformedPayload: expected '<topic> <json>'\n"
            except Exception as exc:
                reply = f"err {type(exc).__name__}: {exc}\n"
            self.wfile.write(reply.encode("utf-8"))
            self.wfile.flush()


class TelemetryListener(socketserver.ThreadingTCPServer):
    """Line-oriented TCP stand-in for a broker: ``<topic> <json>\\n`` per
    reading, one ``ok``/``err`` status line back."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, store: TwinStore, host: str = "127.0.0.1", port: int = 0,
                 building_id: str = ""):
        super().__init__((host, port), _LineHandler)
        self.store = store
        self.building_id = building_id

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[0], self.server_address[1]

    def start(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread
