"""HTTP facade: REST endpoints over the twin graph plus an SSE reading stream.

Design notes
------------
* Every handler is a thin adapter: parse/validate the request, call the
  domain function, serialize the stored record.  All domain errors are
  ``TwinError`` subclasses mapped to 4xx statuses by a single handler, so a
  rejected request never commits an event.
* GET responses are pure projections of graph state: deterministic sort
  orders and dataclass payloads mean two reads without an intervening
  commit are byte-identical.
* ``/stream`` fans out committed readings via per-subscriber bounded
  queues.  The commit path only does ``put_nowait``; a subscriber that
  falls behind is dropped rather than ever blocking a writer.
"""

from __future__ import annotations

import itertools
import json
import queue
import socket
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse

from . import alarms, maintenance, reporting, telemetry
from .errors import (
    BadFilter,
    CorruptLog,
    GapInSequence,
    MalformedPayload,
    PortInUse,
    TwinError,
    UnknownEquipment,
)
from .events import TwinEvent
from .model import (
    AlarmRule,
    DocumentMeta,
    EquipmentItem,
    MaintenancePolicy,
    SensorSpec,
    SpaceRecord,
    parse_iso,
)
from .store import TwinStore

_NOT_FOUND = {
    "UnknownSpace", "UnknownEquipment", "UnknownAlarm", "UnknownJob",
    "UnknownSystem", "UnknownMetric", "UnboundSensor",
}
_CONFLICT = {
    "DuplicateTagConflict", "IdCollision", "BindingConflict",
    "IllegalTransition", "IllegalState",
}

#: Per-subscriber stream buffer; a consumer this far behind gets dropped.
STREAM_QUEUE_SIZE = 256


def _status_for(exc: TwinError) -> int:
    name = type(exc).__name__
    if name in _NOT_FOUND:
        return 404
    if name in _CONFLICT:
        return 409
    return 400


def _parse_at(raw: str, label: str) -> datetime:
    try:
        return parse_iso(raw)
    except (ValueError, TypeError) as exc:
        raise MalformedPayload(f"{label} is not an RFC3339 timestamp: {raw!r}") from exc


def _payload_of(cls, body: dict):
    """Build a domain record from a request body, mapping shape errors."""
    try:
        return cls.from_payload(body)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedPayload(f"bad {cls.__name__} payload: {exc}") from exc


class _Subscriber:
    __slots__ = ("sid", "equipment_id", "queue", "dropped")

    def __init__(self, sid: int, equipment_id: Optional[str]):
        self.sid = sid
        self.equipment_id = equipment_id
        self.queue: queue.Queue = queue.Queue(maxsize=STREAM_QUEUE_SIZE)
        self.dropped = False


class StreamBroker:
    """Fan committed readings out to SSE subscribers without blocking commits."""

    def __init__(self, store: TwinStore):
        self._store = store
        self._subs: dict[int, _Subscriber] = {}
        self._lock = threading.Lock()
        self._ids = itertools.count(1)
        store.add_commit_hook(self._on_commit)

    def subscribe(self, equipment_id: Optional[str] = None) -> _Subscriber:
        if equipment_id is not None and equipment_id not in self._store.equipment:
            raise BadFilter(f"no equipment {equipment_id!r} to filter on")
        sub = _Subscriber(next(self._ids), equipment_id)
        with self._lock:
            self._subs[sub.sid] = sub
        return sub

    def unsubscribe(self, sub: _Subscriber) -> None:
        with self._lock:
            self._subs.pop(sub.sid, None)

    def _on_commit(self, ev: TwinEvent) -> None:
        if ev.kind != "reading_ingested":
            return
        message = dict(ev.payload["reading"])
        spec = self._store.sensors.get(message["sensor_id"])
        message["equipment_id"] = spec.bound_equipment if spec else None
        message["kind"] = spec.kind if spec else None
        message["seq"] = ev.seq
        with self._lock:
            subs = list(self._subs.values())
        for sub in subs:
            if sub.equipment_id is not None and sub.equipment_id != message["equipment_id"]:
                continue
            try:
                sub.queue.put_nowait(message)
            except queue.Full:
                sub.dropped = True
                self.unsubscribe(sub)

    def event_source(self, sub: _Subscriber):
        """Yield SSE frames until the client goes away or the sub is dropped."""
        try:
            yield ": connected\n\n"
            while not sub.dropped:
                try:
                    message = sub.queue.get(timeout=1.0)
                except queue.Empty:
                    yield ": keepalive\n\n"
                    continue
                yield f"event: reading\ndata: {json.dumps(message, sort_keys=True)}\n\n"
        finally:
            self.unsubscribe(sub)


@dataclass
class ServiceConfig:
    """Everything `serve` needs to host one building's twin."""

    listen_port: int = 8000
    building_id: str = "main"
    event_log_path: str | Path = "twin-events.jsonl"
    seed_data_dir: str | Path | None = None
    metric_registry_path: str | Path | None = None
    cors_allowed_origin: str | None = None
    listen_host: str = "127.0.0.1"


def create_app(store: TwinStore, registry: dict | None = None,
               building_id: str = "main",
               cors_allowed_origin: str | None = None) -> FastAPI:
    """Wire the REST + SSE surface around an already-replayed store."""
    registry = registry if registry is not None else reporting.load_registry()
    app = FastAPI(title="twinfm", docs_url=None, redoc_url=None)
    broker = StreamBroker(store)
    app.state.store = store
    app.state.broker = broker
    app.state.building_id = building_id

    if cors_allowed_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_allowed_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(TwinError)
    async def _twin_error(_request: Request, exc: TwinError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    # --- inventory ---------------------------------------------------------

    @app.get("/spaces")
    def list_spaces():
        rows = sorted(store.spaces.values(), key=lambda s: s.room_tag)
        return [s.to_payload() for s in rows]

    @app.post("/spaces")
    def post_space(body: dict = Body(...)):
        record = _payload_of(SpaceRecord, body)
        tag = store.upsert_space(record, overwrite=True)
        return store.spaces[tag].to_payload()

    @app.get("/equipment")
    def list_equipment(room_tag: Optional[str] = None,
                       discipline: Optional[str] = None,
                       omniclass_prefix: Optional[str] = None,
                       augment_id: Optional[str] = None):
        filters = [("by_room_tag", room_tag), ("by_discipline", discipline),
                   ("by_omniclass_prefix", omniclass_prefix),
                   ("by_augment_id", augment_id)]
        active = [(sel, val) for sel, val in filters if val is not None]
        if len(active) > 1:
            raise BadFilter("at most one equipment filter may be given")
        if active:
            rows = store.query(*active[0])
        else:
            rows = sorted(store.equipment.values(),
                          key=lambda e: (e.augment_id_instance, e.space_instance))
        return [e.to_payload() for e in rows]

    @app.post("/equipment")
    def post_equipment(body: dict = Body(...)):
        record = _payload_of(EquipmentItem, body)
        key = store.upsert_equipment(record)
        return store.equipment[key].to_payload()

    @app.get("/equipment/{equipment_id}")
    def get_equipment(equipment_id: str):
        item = store.equipment.get(equipment_id)
        if item is None:
            raise UnknownEquipment(f"no equipment {equipment_id!r}")
        return item.to_payload()

    @app.get("/equipment/{equipment_id}/documents")
    def list_documents(equipment_id: str):
        return [d.to_payload() for d in store.documents_for(equipment_id)]

    @app.post("/equipment/{equipment_id}/documents")
    def post_document(equipment_id: str, body: dict = Body(...)):
        body = dict(body)
        body.setdefault("doc_id", "")
        meta = _payload_of(DocumentMeta, body)
        doc_id = store.attach_document(equipment_id, meta)
        return store.documents[doc_id].to_payload()

    # --- sensors, readings, alarms ------------------------------------------

    @app.get("/sensors")
    def list_sensors(equipment: Optional[str] = None):
        rows = sorted(store.sensors.values(), key=lambda s: s.sensor_id)
        if equipment is not None:
            rows = [s for s in rows if s.bound_equipment == equipment]
        return [s.to_payload() for s in rows]

    @app.post("/sensors")
    def post_sensor(body: dict = Body(...)):
        if "spec" not in body:
            raise MalformedPayload("body must carry a 'spec' object")
        spec_body = dict(body["spec"])
        spec_body.setdefault("sensor_id", "")
        equipment_id = spec_body.pop("bound_equipment", None) or body.get("equipment_id")
        if not equipment_id:
            raise MalformedPayload("spec.bound_equipment or equipment_id is required")
        spec_body["bound_equipment"] = equipment_id
        spec = _payload_of(SensorSpec, spec_body)
        rule = _payload_of(AlarmRule, {**body["rule"], "sensor_id": ""}) \
            if body.get("rule") else None
        sensor_id = telemetry.bind_sensor(store, equipment_id, spec, rule=rule)
        return store.sensors[sensor_id].to_payload()

    @app.get("/alarms")
    def list_alarms(active: bool = False):
        if active:
            rows = alarms.active_alarms(store)
        else:
            rows = sorted(store.alarms.values(), key=lambda a: a.alarm_id)
        return [a.to_payload() for a in rows]

    @app.post("/alarms/{alarm_id}/ack")
    def ack_alarm(alarm_id: str, body: dict = Body(...)):
        actor = body.get("actor")
        if not actor or not isinstance(actor, str):
            raise MalformedPayload("body must carry a non-empty 'actor'")
        record = alarms.acknowledge(store, alarm_id, actor)
        return record.to_payload()

    # --- jobs ----------------------------------------------------------------

    @app.get("/jobs")
    def get_jobs(status: Optional[str] = None, role: Optional[str] = None,
                 target: Optional[str] = None):
        rows = maintenance.list_jobs(store, status=status, role=role, target=target)
        return [j.to_payload() for j in rows]

    @app.post("/jobs")
    def post_job(body: dict = Body(...)):
        target = body.get("target")
        description = body.get("description")
        if not isinstance(target, str) or not target:
            raise MalformedPayload("body must carry a non-empty 'target'")
        job = maintenance.create_reactive_job(
            store, target, description or "", resources=body.get("resources"))
        return job.to_payload()

    @app.post("/jobs/{job_id}/transition")
    def post_transition(job_id: str, body: dict = Body(...)):
        to_status = body.get("to_status")
        actor = body.get("actor")
        if not isinstance(to_status, str) or not isinstance(actor, str) or not actor:
            raise MalformedPayload("body must carry 'to_status' and 'actor'")
        job = maintenance.transition(store, job_id, to_status, actor,
                                     comment=body.get("comment"))
        return job.to_payload()

    @app.post("/jobs/{job_id}/comments")
    def post_comment(job_id: str, body: dict = Body(...)):
        actor = body.get("actor")
        text = body.get("text")
        if not isinstance(actor, str) or not actor:
            raise MalformedPayload("body must carry a non-empty 'actor'")
        job = maintenance.add_comment(store, job_id, actor, text or "")
        return job.to_payload()

    @app.post("/policies")
    def post_policy(body: dict = Body(...)):
        body = dict(body)
        body.setdefault("policy_id", "")
        body.setdefault("target_kind", "")
        policy = _payload_of(MaintenancePolicy, body)
        policy_id = maintenance.create_policy(store, policy)
        return store.policies[policy_id].to_payload()

    @app.get("/policies")
    def list_policies():
        rows = sorted(store.policies.values(), key=lambda p: p.policy_id)
        return [p.to_payload() for p in rows]

    # --- reports and dashboards ----------------------------------------------

    def _window(from_raw: str, to_raw: str) -> tuple[datetime, datetime]:
        from_at = _parse_at(from_raw, "from")
        to_at = _parse_at(to_raw, "to")
        reporting.check_window(from_at, to_at)
        return from_at, to_at

    @app.get("/reports/maintenance")
    def report_maintenance(from_raw: str = Query(alias="from"),
                           to_raw: str = Query(alias="to")):
        from_at, to_at = _window(from_raw, to_raw)
        return reporting.maintenance_summary(store, from_at, to_at)

    @app.get("/reports/health")
    def report_health(from_raw: str = Query(alias="from"),
                      to_raw: str = Query(alias="to")):
        from_at, to_at = _window(from_raw, to_raw)
        return reporting.equipment_health(store, from_at, to_at)

    @app.get("/reports/staff")
    def report_staff(from_raw: str = Query(alias="from"),
                     to_raw: str = Query(alias="to")):
        from_at, to_at = _window(from_raw, to_raw)
        return reporting.staff_activity(store, from_at, to_at)

    @app.get("/dashboards/{system}")
    def dashboard(system: str,
                  from_raw: str = Query(alias="from"),
                  to_raw: str = Query(alias="to"),
                  metric: Optional[str] = None,
                  bucket: int = 300):
        from_at, to_at = _window(from_raw, to_raw)
        if metric is not None:
            return reporting.dashboard_series(store, registry, system, metric,
                                              from_at, to_at, bucket)
        return reporting.dashboard_all_series(store, registry, system,
                                              from_at, to_at, bucket)

    @app.get("/dashboards")
    def dashboard_index():
        return {name: {"title": entry["title"], "metrics": sorted(entry["metrics"])}
                for name, entry in sorted(registry.items())}

    # --- live stream -----------------------------------------------------------

    @app.get("/stream")
    def stream(equipment: Optional[str] = None):
        sub = broker.subscribe(equipment)
        return StreamingResponse(broker.event_source(sub),
                                 media_type="text/event-stream")

    return app


def _check_port_free(host: str, port: int) -> None:
    if not 1 <= port <= 65535:
        raise MalformedPayload(f"listen_port must be in [1, 65535], got {port}")
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise PortInUse(f"cannot listen on {host}:{port}: {exc}") from exc
    finally:
        probe.close()


def build_store(config: ServiceConfig) -> TwinStore:
    """Replay (or create) the event log named by the config."""
    try:
        store = TwinStore.open(config.event_log_path)
    except GapInSequence as exc:
        raise CorruptLog(str(exc)) from exc
    if config.seed_data_dir and not store.events:
        from .seed import load_seed
        load_seed(store, config.seed_data_dir)
    return store


def serve(config: ServiceConfig) -> None:
    """Host the twin over HTTP; blocks until interrupted."""
    import uvicorn

    _check_port_free(config.listen_host, config.listen_port)
    store = build_store(config)
    registry = reporting.load_registry(config.metric_registry_path)
    app = create_app(store, registry=registry, building_id=config.building_id,
                     cors_allowed_origin=config.cors_allowed_origin)
    try:
        uvicorn.run(app, host=config.listen_host, port=config.listen_port,
                    log_level="warning")
    finally:
        store.close()
