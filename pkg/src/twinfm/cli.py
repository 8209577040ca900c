"""`twinctl` — command-line entry points for the twin.

Exit codes follow one rule everywhere: 0 success, 1 structural failure
(unreadable/corrupt files, port in use), 2 validation failure (well-formed
input that breaks a domain rule, or a plan/ingest that does not pass).
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from datetime import date

import click

from . import maintenance, reporting, scanplan, telemetry
from .errors import TwinError
from .model import parse_iso
from .service import ServiceConfig, serve
from .store import TwinStore

_STRUCTURAL = {
    "FileUnreadable", "HeaderMismatch", "CorruptLog", "GapInSequence",
    "UnknownEventKind", "PortInUse",
}

DEFAULT_SIM_START = "2024-03-01T00:00:00Z"


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=False))


def _domain_errors(fn):
    """Map TwinError subclasses onto the 1/2 exit-code convention."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TwinError as exc:
            click.echo(json.dumps({"error": type(exc).__name__,
                                   "message": str(exc)}), err=True)
            code = 1 if type(exc).__name__ in _STRUCTURAL else 2
            raise SystemExit(code)

    return wrapper


def _open_store(log_path: str) -> TwinStore:
    return TwinStore.open(log_path)


def _parse_date(raw: str, label: str) -> date:
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise click.BadParameter(f"{label} must be YYYY-MM-DD, got {raw!r}")


@click.group()
def cli() -> None:
    """Manage a building digital twin: ingest, simulate, maintain, report."""


@cli.command()
@click.option("--spaces", "spaces_csv", required=True,
              type=click.Path(), help="Room inventory CSV.")
@click.option("--equipment", "equipment_csv", required=True,
              type=click.Path(), help="Equipment inventory CSV.")
@click.option("--strict", is_flag=True,
              help="Reject the whole batch if any row fails validation.")
@click.option("--log", "log_path", default="twin-events.jsonl",
              show_default=True, help="Event log to append to.")
@_domain_errors
def ingest(spaces_csv: str, equipment_csv: str, strict: bool, log_path: str) -> None:
    """Load room and equipment CSVs into the twin graph."""
    from .ingest import load_inventory

    store = _open_store(log_path)
    try:
        report = load_inventory(store, spaces_csv, equipment_csv, strict=strict)
    finally:
        store.close()
    _echo_json(report.to_payload())
    if report.violations:
        raise SystemExit(2)


@cli.command("scanplan")
@click.option("--floor", "floor_path", required=True, type=click.Path(),
              help="Floor outline as a GeoJSON polygon.")
@click.option("--plan", "plan_path", required=True, type=click.Path(),
              help="Scan plan JSON (positions, targets, range).")
@click.option("--min-coverage", default=0.99, show_default=True, type=float)
@click.option("--grid-step", default=1.0, show_default=True, type=float)
@_domain_errors
def scanplan_cmd(floor_path: str, plan_path: str, min_coverage: float,
                 grid_step: float) -> None:
    """Check a laser-scan plan for coverage, overlap, and sequence."""
    floor = scanplan.load_floor(floor_path)
    plan = scanplan.load_plan(plan_path)
    report = scanplan.validate_plan(floor, plan, min_coverage=min_coverage,
                                    grid_step=grid_step)
    _echo_json(report.to_payload())
    if not report.passed:
        raise SystemExit(2)


@cli.command()
@click.option("--seed", default=42, show_default=True, type=int,
              help="Noise seed; same seed, same stream.")
@click.option("--hours", default=1.0, show_default=True, type=float)
@click.option("--speedup", default=None, type=float,
              help="Accepted for compatibility; generation is offline.")
@click.option("--start", "start_raw", default=DEFAULT_SIM_START,
              show_default=True, help="Window start (RFC3339).")
@click.option("--log", "log_path", default="twin-events.jsonl",
              show_default=True, help="Event log holding the sensor graph.")
@_domain_errors
def simulate(seed: int, hours: float, speedup: float | None,
             start_raw: str, log_path: str) -> None:
    """Generate one window of deterministic readings for every sensor."""
    start = parse_iso(start_raw)
    window_s = int(hours * 3600)
    store = _open_store(log_path)
    try:
        events = telemetry.run_simulation(store, seed, start, window_s,
                                          speedup=speedup)
    finally:
        store.close()
    kinds = [ev.kind for ev in events]
    _echo_json({
        "seed": seed,
        "start": start_raw,
        "window_s": window_s,
        "events_appended": len(events),
        "readings": kinds.count("reading_ingested"),
        "alarms_raised": kinds.count("alarm_raised"),
        "alarms_cleared": kinds.count("alarm_cleared"),
        "log": log_path,
    })


@cli.group()
def jobs() -> None:
    """Maintenance job operations."""


@jobs.command("generate")
@click.option("--from", "from_raw", required=True, help="Horizon start (YYYY-MM-DD).")
@click.option("--to", "to_raw", required=True, help="Horizon end (YYYY-MM-DD).")
@click.option("--policy", "policy_id", default=None,
              help="Limit to one policy id.")
@click.option("--log", "log_path", default="twin-events.jsonl",
              show_default=True)
@_domain_errors
def jobs_generate(from_raw: str, to_raw: str, policy_id: str | None,
                  log_path: str) -> None:
    """Materialize preventive jobs for policy occurrences in a horizon."""
    date_from = _parse_date(from_raw, "--from")
    date_to = _parse_date(to_raw, "--to")
    store = _open_store(log_path)
    try:
        created = maintenance.generate_jobs(store, date_from, date_to,
                                            policy_id=policy_id)
    finally:
        store.close()
    _echo_json({"created": [j.job_id for j in created], "count": len(created)})


@cli.command()
@click.option("--from", "from_raw", required=True, help="Window start (RFC3339).")
@click.option("--to", "to_raw", required=True, help="Window end (RFC3339).")
@click.option("--format", "fmt", default="json", show_default=True,
              type=click.Choice(["json", "csv"]))
@click.option("--log", "log_path", default="twin-events.jsonl",
              show_default=True)
@_domain_errors
def report(from_raw: str, to_raw: str, fmt: str, log_path: str) -> None:
    """Print the maintenance / health / staff composite report."""
    from_at = parse_iso(from_raw)
    to_at = parse_iso(to_raw)
    store = _open_store(log_path)
    try:
        payload = reporting.composite_report(store, from_at, to_at)
    finally:
        store.close()
    if fmt == "json":
        _echo_json(payload)
        return
    writer = csv.writer(sys.stdout)
    writer.writerow(["key", "value"])
    for key, value in _flatten(payload):
        writer.writerow([key, value])


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for key in obj:
            yield from _flatten(obj[key], f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(obj, list):
        yield prefix, json.dumps(obj, sort_keys=True)
    else:
        yield prefix, obj


@cli.command("serve")
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--building", default="main", show_default=True,
              help="Building id used in telemetry topics.")
@click.option("--log", "log_path", default="twin-events.jsonl",
              show_default=True)
@click.option("--seed-dir", default=None, type=click.Path(),
              help="Seed fixture dir loaded into an empty log on startup.")
@click.option("--registry", "registry_path", default=None, type=click.Path(),
              help="Metric registry JSON (defaults to the packaged one).")
@click.option("--cors", "cors_origin", default=None,
              help="Allowed CORS origin for the dashboard UI.")
@_domain_errors
def serve_cmd(port: int, host: str, building: str, log_path: str,
              seed_dir: str | None, registry_path: str | None,
              cors_origin: str | None) -> None:
    """Serve the REST + SSE API over HTTP (blocks)."""
    serve(ServiceConfig(
        listen_port=port,
        listen_host=host,
        building_id=building,
        event_log_path=log_path,
        seed_data_dir=seed_dir,
        metric_registry_path=registry_path,
        cors_allowed_origin=cors_origin,
    ))


@cli.command("seed")
@click.option("--dir", "seed_dir", default=None, type=click.Path(),
              help="Fixture directory (defaults to the packaged seed).")
@click.option("--log", "log_path", default="twin-events.jsonl",
              show_default=True)
@_domain_errors
def seed_cmd(seed_dir: str | None, log_path: str) -> None:
    """Load the packaged building inventory into an event log."""
    from .seed import category_counts, load_seed

    store = _open_store(log_path)
    try:
        load_seed(store, seed_dir)
        counts = category_counts(store)
        _echo_json({
            "spaces": len(store.spaces),
            "equipment_counted": sum(counts.values()),
            "equipment_total": len(store.equipment),
            "sensors": len(store.sensors),
            "policies": len(store.policies),
            "events": len(store.events),
            "log": log_path,
        })
    finally:
        store.close()


main = cli

if __name__ == "__main__":
    main()
