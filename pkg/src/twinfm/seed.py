"""Baseline fixture set: a five-floor building inventory with sensors,
alarm rules, and sample maintenance policies.

The shipped dataset's itemized category counts sum to 512 equipment items;
the source inventory's own headline summary says 509.  That discrepancy is
recorded here and in the manifest rather than reconciled — the itemized
list is what the fixtures (and every count check) bind to.

Beyond the four counted sensor categories (temperature, humidity, CO,
occupancy), extra simulated-only bindings feed the dashboards (AHU supply
temperature, generator fuel level, ...); those are flagged
``dashboard_support`` and excluded from the manifest's binding count, as is
the one distribution panel board added so the electrical-panel dashboard
has a host item.
"""

from __future__ import annotations

import json
import logging
from datetime import date
from importlib import resources
from pathlib import Path

from .errors import ManifestMismatch
from .ingest import load_inventory, read_csv_rows
from .model import AlarmRule, MaintenancePolicy, SensorSpec
from .omniclass import canonical
from .store import TwinStore
from .telemetry import bind_sensor
from .maintenance import create_policy

logger = logging.getLogger(__name__)

SEED_VERSION = 1

# category labels used by the manifest -> the omniclass type each maps to
CATEGORY_TYPES = {
    "AHU": "23-33 13 00 Air Handling Units",
    "ERU": "23-33 15 00 Energy Recovery Units",
    "VAV": "23-33 17 00 Variable Air Volume Units",
    "hot water pumps": "23-33 29 00 Hot Water Pumps",
    "temperature sensors": "23-33 41 11 Temperature Sensors",
    "humidity sensors": "23-33 41 13 Humidity Sensors",
    "CO sensors": "23-33 41 15 Carbon Monoxide Sensors",
    "lighting fixtures": "23-35 47 00 Electrical Lighting",
    "transformers": "23-35 23 00 Transformers",
    "faucets": "23-31 21 11 Faucets",
    "sinks": "23-31 21 13 Sinks",
    "toilets": "23-31 21 15 Toilets",
    "urinals": "23-31 21 17 Urinals",
    "service sinks": "23-31 21 19 Service Sinks",
    "water heaters": "23-31 25 00 Water Heaters",
    "drinking fountains": "23-31 23 00 Drinking Fountains",
    "elevators": "23-23 11 00 Elevators",
    "generator": "23-35 17 00 Generators",
    "occupancy sensors": "23-29 13 00 Occupancy Sensors",
}

# dashboard-support-only item types (never counted against the inventory)
PANEL_TYPE = "23-35 25 00 Distribution Panel Boards"

SYSTEM_CODES = {
    "mechanical": "23-33 00 00 HVAC",
    "electrical": "23-04 50 Electrical",
    "plumbing": "23-31 00 00 Plumbing",
    "conveying": "23-23 00 00 Conveying Equipment",
    "communication": "23-29 00 00 Communications",
}

SENSOR_HEADER = ["Sensor_ID", "Equipment_Instance", "Kind", "Unit", "Interval_S",
                 "Low", "High", "Dashboard_Support", "Live_Capable", "Sim_Profile"]
RULE_HEADER = ["Sensor_ID", "Low", "High", "Raise_Debounce", "Clear_Debounce"]
POLICY_HEADER = ["Policy_ID", "Target", "Target_Kind", "Tasks",
                 "Frequency_Days", "Start_Date", "Resources"]

FIXTURE_FILES = ("spaces.csv", "equipment.csv", "sensors.csv",
                 "rules.csv", "policies.csv", "manifest.json")


def packaged_seed_dir() -> Path:
    return Path(str(resources.files("twinfm").joinpath("seed_data")))


def category_counts(store: TwinStore) -> dict[str, int]:
    """Current per-category item counts, excluding dashboard-support items."""
    by_type: dict[str, int] = {}
    for item in store.equipment.values():
        if item.dashboard_support:
            continue
        try:
            by_type[canonical(item.omniclass_type)] = \
                by_type.get(canonical(item.omniclass_type), 0) + 1
        except Exception:
            continue
    return {cat: by_type.get(canonical(code), 0)
            for cat, code in CATEGORY_TYPES.items()}


def _truthy(cell: str) -> bool:
    return cell.strip().lower() in ("1", "true", "yes")


def load_seed(store: TwinStore, seed_dir: str | Path | None = None) -> dict:
    """Load all fixtures, verify the manifest, bind sensors, create policies.

    Deterministic and idempotent: a second load over the same store commits
    nothing new.  Raises ManifestMismatch when the fixtures and manifest
    disagree.
    """
    base = Path(seed_dir) if seed_dir is not None else packaged_seed_dir()
    with open(base / "manifest.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("version") != SEED_VERSION:
        raise ManifestMismatch(
            f"manifest version {manifest.get('version')!r}, expected {SEED_VERSION}")

    with store.lock:
        report = load_inventory(store, base / "spaces.csv", base / "equipment.csv")
        rejecting = [v for v in report.violations if v.rejects()]
        if rejecting:
            raise ManifestMismatch(
                f"seed inventory has {len(rejecting)} rejected rows; first: "
                f"{rejecting[0].rule}: {rejecting[0].message}")

        if report.spaces_loaded != manifest["space_count"]:
            raise ManifestMismatch(
                f"space_count {manifest['space_count']} != loaded {report.spaces_loaded}")

        actual = category_counts(store)
        for cat, expected in manifest["equipment_counts"].items():
            if cat not in actual:
                raise ManifestMismatch(f"manifest names unknown category {cat!r}")
            if actual[cat] != expected:
                raise ManifestMismatch(
                    f"category {cat!r}: manifest says {expected}, fixtures load {actual[cat]}")
        total = sum(manifest["equipment_counts"].values())
        if sum(actual.values()) != total:
            raise ManifestMismatch(
                f"itemized total {total} != loaded {sum(actual.values())}")

        rules: dict[str, AlarmRule] = {}
        for row in read_csv_rows(base / "rules.csv", RULE_HEADER):
            rules[row["Sensor_ID"]] = AlarmRule(
                sensor_id=row["Sensor_ID"],
                low=float(row["Low"]), high=float(row["High"]),
                raise_debounce=int(row["Raise_Debounce"]),
                clear_debounce=int(row["Clear_Debounce"]),
            )

        counted_bindings = 0
        for row in read_csv_rows(base / "sensors.csv", SENSOR_HEADER):
            spec = SensorSpec(
                sensor_id=row["Sensor_ID"],
                bound_equipment=row["Equipment_Instance"],
                kind=row["Kind"],
                unit=row["Unit"],
                interval_s=int(row["Interval_S"]),
                low=float(row["Low"]),
                high=float(row["High"]),
                sim_profile=json.loads(row["Sim_Profile"]) if row["Sim_Profile"].strip() else {},
                dashboard_support=_truthy(row["Dashboard_Support"]),
                live_capable=_truthy(row["Live_Capable"]),
            )
            bind_sensor(store, row["Equipment_Instance"], spec,
                        rule=rules.get(spec.sensor_id))
            if not spec.dashboard_support:
                counted_bindings += 1

        if counted_bindings != manifest["sensor_binding_count"]:
            raise ManifestMismatch(
                f"sensor_binding_count {manifest['sensor_binding_count']} != "
                f"bound {counted_bindings}")

        for row in read_csv_rows(base / "policies.csv", POLICY_HEADER):
            policy = MaintenancePolicy(
                policy_id=row["Policy_ID"],
                target=row["Target"],
                target_kind=row["Target_Kind"],
                tasks=json.loads(row["Tasks"]),
                frequency_days=int(row["Frequency_Days"]),
                start_date=date.fromisoformat(row["Start_Date"]),
                resources=json.loads(row["Resources"]) if row["Resources"].strip() else [],
            )
            create_policy(store, policy)

        if len(store.policies) < manifest["policy_count"]:
            raise ManifestMismatch(
                f"policy_count {manifest['policy_count']} != created {len(store.policies)}")

        return manifest
