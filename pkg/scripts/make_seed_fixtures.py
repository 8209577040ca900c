#!/usr/bin/env python3
"""Regenerate the packaged seed fixtures (src/twinfm/seed_data/).

Fully deterministic: room placement cycles fixed lists, sensor ids follow
file order, and equipment ids come from the same assignment rule the loader
applies.  Run from the repository root:

    python scripts/make_seed_fixtures.py
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from twinfm.ingest import EQUIPMENT_HEADER, SPACE_HEADER, load_inventory  # noqa: E402
from twinfm.omniclass import canonical  # noqa: E402
from twinfm.seed import (  # noqa: E402
    CATEGORY_TYPES,
    PANEL_TYPE,
    POLICY_HEADER,
    RULE_HEADER,
    SEED_VERSION,
    SENSOR_HEADER,
    SYSTEM_CODES,
)
from twinfm.store import TwinStore  # noqa: E402

OUT_DIR = ROOT / "src" / "twinfm" / "seed_data"

CAT_OFFICE = "13-55 11 00 Office Spaces"
CAT_STUDY = "13-55 13 00 Study Spaces"
CAT_RESTROOM = "13-23 17 00 Restroom"
CAT_BREAK = "13-57 17 13 Break Room"
CAT_MECH = "13-17 11 00 Mechanical Rooms"
CAT_ELEC = "13-17 13 00 Electrical Rooms"
CAT_CORRIDOR = "13-27 11 00 Corridors"
CAT_LOBBY = "13-27 13 00 Lobbies"
CAT_STORAGE = "13-41 11 00 Storage Rooms"
CAT_JANITOR = "13-23 19 00 Janitor Closets"

SERVICE_CATS = {CAT_MECH, CAT_ELEC, CAT_STORAGE, CAT_JANITOR}

# (tag, name, category, floor)
ROOMS = [
    ("Room B01", "Mechanical Plant", CAT_MECH, "B"),
    ("Room B02", "Main Electrical Room", CAT_ELEC, "B"),
    ("Room B03", "Generator Room", CAT_ELEC, "B"),
    ("Room B04", "Elevator Machine Room", CAT_MECH, "B"),
    ("Room B05", "Storage", CAT_STORAGE, "B"),
    ("Corridor B", "Basement Corridor", CAT_CORRIDOR, "B"),
    ("Service B", "Janitor Closet B", CAT_JANITOR, "B"),
    ("Room 101", "Main Study Area", CAT_OFFICE, "1"),
    ("140", "Reading Commons", CAT_STUDY, "1"),
    ("Room 102", "Circulation Desk", CAT_OFFICE, "1"),
    ("Room 103", "Office 103", CAT_OFFICE, "1"),
    ("Room 104", "Staff Break Room", CAT_BREAK, "1"),
    ("Restroom A", "Men's RRs", CAT_RESTROOM, "1"),
    ("Restroom B", "Women's RRs", CAT_RESTROOM, "1"),
    ("Lobby 1", "Entrance Lobby", CAT_LOBBY, "1"),
    ("Corridor 1", "First Floor Corridor", CAT_CORRIDOR, "1"),
    ("Service 1", "Janitor Closet 1", CAT_JANITOR, "1"),
    ("Room 201", "Study Area 201", CAT_STUDY, "2"),
    ("Room 202", "Office 202", CAT_OFFICE, "2"),
    ("Room 203", "Office 203", CAT_OFFICE, "2"),
    ("Room 230", "Group Study 230", CAT_STUDY, "2"),
    ("Room 204", "Mechanical Room 2", CAT_MECH, "2"),
    ("Restroom C", "Men's RRs 2", CAT_RESTROOM, "2"),
    ("Restroom D", "Women's RRs 2", CAT_RESTROOM, "2"),
    ("Corridor 2", "Second Floor Corridor", CAT_CORRIDOR, "2"),
    ("Service 2", "Janitor Closet 2", CAT_JANITOR, "2"),
    ("Room 301", "Study Area 301", CAT_STUDY, "3"),
    ("Room 302", "Office 302", CAT_OFFICE, "3"),
    ("Room 303", "Quiet Reading Room", CAT_STUDY, "3"),
    ("Room 304", "Break Room 3", CAT_BREAK, "3"),
    ("Restroom E", "Men's RRs 3", CAT_RESTROOM, "3"),
    ("Restroom F", "Women's RRs 3", CAT_RESTROOM, "3"),
    ("Corridor 3", "Third Floor Corridor", CAT_CORRIDOR, "3"),
    ("Service 3", "Janitor Closet 3", CAT_JANITOR, "3"),
    ("Room 401", "Study Area 401", CAT_STUDY, "4"),
    ("Room 402", "Office 402", CAT_OFFICE, "4"),
    ("Room 403", "Seminar Room", CAT_OFFICE, "4"),
    ("Room 404", "Mechanical Room 4", CAT_MECH, "4"),
    ("Restroom G", "Men's RRs 4", CAT_RESTROOM, "4"),
    ("Restroom H", "Women's RRs 4", CAT_RESTROOM, "4"),
    ("Corridor 4", "Fourth Floor Corridor", CAT_CORRIDOR, "4"),
    ("Service 4", "Janitor Closet 4", CAT_JANITOR, "4"),
]

ALL_TAGS = [r[0] for r in ROOMS]
OCCUPIABLE = [r[0] for r in ROOMS if r[2] not in SERVICE_CATS]
RESTROOMS = [r[0] for r in ROOMS if r[2] == CAT_RESTROOM]
MENS_ROOMS = ["Restroom A", "Restroom C", "Restroom E", "Restroom G"]
JANITOR_CLOSETS = ["Service 1", "Service 2", "Service 3", "Service 4"]
MECH_SPOTS = ["Room B01", "Room 204", "Room 404", "Room B05"]


def cycle(seq: list[str], count: int) -> list[str]:
    return [seq[i % len(seq)] for i in range(count)]


# category -> (discipline, placement list, om-properties template)
EQUIPMENT_PLAN = [
    ("AHU", "mechanical", ["Room B01", "Room 204", "Room 404"],
     {"manufacturer": "NorthAir", "model": "NA-4400", "capacity": "12000 CFM",
      "phases": 3, "dimensions": "84x62x58 in"}),
    ("ERU", "mechanical", ["Room B01"],
     {"manufacturer": "NorthAir", "model": "ER-900", "capacity": "6000 CFM",
      "phases": 3, "dimensions": "72x48x50 in"}),
    ("VAV", "mechanical", ["Room 104"],
     {"manufacturer": "NorthAir", "model": "VV-120", "capacity": "1200 CFM",
      "phases": 1, "dimensions": "24x18x14 in"}),
    ("hot water pumps", "mechanical", ["Room B01", "Room B01"],
     {"manufacturer": "AquaFlow", "model": "HP-75", "capacity": "150 GPM",
      "phases": 3, "dimensions": "30x18x20 in"}),
    ("temperature sensors", "mechanical", cycle(OCCUPIABLE, 30),
     {"manufacturer": "SenseWell", "model": "TS-22", "range": "32-120 F"}),
    ("humidity sensors", "mechanical", cycle(OCCUPIABLE, 20),
     {"manufacturer": "SenseWell", "model": "HS-28", "range": "0-100 %RH"}),
    ("CO sensors", "mechanical", cycle(OCCUPIABLE, 20),
     {"manufacturer": "SenseWell", "model": "CS-19", "range": "0-100 ppm"}),
    ("lighting fixtures", "electrical", cycle(ALL_TAGS, 300),
     {"manufacturer": "VoltEdge", "model": "LF-2x4", "consumption": "40 W"}),
    ("transformers", "electrical", ["Room B02", "Room B02"],
     {"manufacturer": "VoltEdge", "model": "TX-480", "capacity": "225 kVA",
      "phases": 3}),
    ("faucets", "plumbing", cycle(RESTROOMS, 16),
     {"manufacturer": "AquaFlow", "model": "FC-20", "consumption": "1.2 GPM"}),
    ("sinks", "plumbing", cycle(RESTROOMS, 16),
     {"manufacturer": "AquaFlow", "model": "SK-31", "dimensions": "20x17 in"}),
    ("toilets", "plumbing", cycle(RESTROOMS, 16),
     {"manufacturer": "AquaFlow", "model": "WC-12", "consumption": "1.28 GPF"}),
    ("urinals", "plumbing", cycle(MENS_ROOMS, 8),
     {"manufacturer": "AquaFlow", "model": "UR-08", "consumption": "0.5 GPF"}),
    ("service sinks", "plumbing", cycle(JANITOR_CLOSETS, 4),
     {"manufacturer": "AquaFlow", "model": "SS-40", "dimensions": "24x24 in"}),
    ("water heaters", "plumbing", cycle(MECH_SPOTS, 8),
     {"manufacturer": "AquaFlow", "model": "WH-80", "capacity": "80 gal",
      "consumption": "4.5 kW"}),
    ("drinking fountains", "plumbing", ["Corridor 1", "Corridor 2"],
     {"manufacturer": "AquaFlow", "model": "DF-2H", "consumption": "0.5 GPM"}),
    ("elevators", "conveying", ["Lobby 1", "Corridor 2"],
     {"manufacturer": "LiftCore", "model": "LC-2500", "capacity": "2500 lb",
      "phases": 3}),
    ("generator", "electrical", ["Room B03"],
     {"manufacturer": "GridPoint", "model": "GP-150D", "capacity": "150 kW",
      "phases": 3, "consumption": "10.9 gal/h"}),
    ("occupancy sensors", "communication", cycle(ALL_TAGS, 60),
     {"manufacturer": "SenseWell", "model": "OS-11", "range": "30 ft"}),
]

PANEL_ROW = ("electrical", "Room B02",
             {"manufacturer": "GridPoint", "model": "PB-42", "capacity": "400 A",
              "phases": 3, "dashboard_support": True})

POLICIES = [
    ("POL-001", CATEGORY_TYPES["AHU"], "equipment_type",
     ["Replace filters", "Inspect belts and bearings", "Check condensate drain"],
     90, "2024-01-01", [{"name": "MERV-13 filter", "quantity": 2}]),
    ("POL-002", CATEGORY_TYPES["generator"], "equipment_type",
     ["Check fuel level", "Run load test", "Inspect battery and charger"],
     30, "2024-01-01", [{"name": "Diesel fuel (gal)", "quantity": 20}]),
    ("POL-003", CATEGORY_TYPES["water heaters"], "equipment_type",
     ["Flush tank", "Test temperature and pressure relief valve"],
     365, "2024-02-01", []),
    ("POL-004", CATEGORY_TYPES["elevators"], "equipment_type",
     ["Inspect hoist cables", "Test door sensors", "Lubricate guide rails"],
     30, "2024-01-15", [{"name": "Rail lubricant (qt)", "quantity": 1}]),
    ("POL-005", "Restroom A", "room",
     ["Clean and disinfect fixtures", "Restock supplies", "Mop floor"],
     1, "2024-03-01", [{"name": "Disinfectant (qt)", "quantity": 1}]),
    ("POL-006", "Room 101", "room",
     ["Vacuum and dust", "Empty recycling", "Wipe tables"],
     7, "2024-03-04", []),
]


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def build_inventory() -> tuple[list[list], list[list]]:
    space_rows = [[cat, name, tag, "", floor] for tag, name, cat, floor in ROOMS]
    equip_rows = []
    for category, discipline, spots, props in EQUIPMENT_PLAN:
        type_code = CATEGORY_TYPES[category]
        system = SYSTEM_CODES[discipline]
        for spot in spots:
            equip_rows.append([system, type_code, "", "", spot, discipline,
                               json.dumps(props, sort_keys=True)])
    discipline, spot, props = PANEL_ROW
    equip_rows.append([SYSTEM_CODES[discipline], PANEL_TYPE, "", "", spot,
                       discipline, json.dumps(props, sort_keys=True)])
    return space_rows, equip_rows


def ids_by_type(store: TwinStore, type_code: str) -> list[str]:
    wanted = canonical(type_code)
    hits = [e.augment_id_instance for e in store.equipment.values()
            if canonical(e.omniclass_type) == wanted]
    return sorted(hits)


def build_bindings(store: TwinStore) -> tuple[list[list], list[list]]:
    sensor_rows: list[list] = []
    rule_rows: list[list] = []
    counter = 0

    def add(eq_id, kind, unit, interval, low, high, profile,
            dashboard=False, live=False, rule=None):
        nonlocal counter
        counter += 1
        sid = f"SN-{counter:05d}"
        sensor_rows.append([sid, eq_id, kind, unit, interval, low, high,
                            "true" if dashboard else "false",
                            "true" if live else "false",
                            json.dumps(profile, sort_keys=True)])
        if rule is not None:
            rule_rows.append([sid, rule[0], rule[1], 1, 3])

    # the four counted sensor categories (one binding per sensor item)
    for eq in ids_by_type(store, CATEGORY_TYPES["temperature sensors"]):
        add(eq, "temperature", "F", 300, 68, 76,
            {"baseline": 72.0, "diurnal_amplitude": 3.0, "noise_sigma": 0.5},
            rule=(68, 76))
    for eq in ids_by_type(store, CATEGORY_TYPES["humidity sensors"]):
        add(eq, "humidity", "%RH", 180, 30, 60,
            {"baseline": 45.0, "diurnal_amplitude": 8.0, "noise_sigma": 1.5},
            rule=(30, 60))
    for eq in ids_by_type(store, CATEGORY_TYPES["CO sensors"]):
        add(eq, "co", "ppm", 120, 0, 9,
            {"baseline": 2.0, "diurnal_amplitude": 1.0, "noise_sigma": 0.3},
            rule=(0, 9))
    for eq in ids_by_type(store, CATEGORY_TYPES["occupancy sensors"]):
        add(eq, "occupancy", "state", 60, 0, 1,
            {"occupied_start_hour": 8, "occupied_end_hour": 18,
             "occupied_probability": 0.8, "vacant_probability": 0.05},
            live=True)

    # dashboard-support bindings (flagged, excluded from the counted 130)
    for eq in ids_by_type(store, CATEGORY_TYPES["AHU"]):
        add(eq, "flow_rate", "CFM", 300, 400, 2000,
            {"baseline": 1200.0, "diurnal_amplitude": 200.0, "noise_sigma": 30.0},
            dashboard=True)
        add(eq, "temperature", "F", 300, 48, 65,
            {"baseline": 55.0, "diurnal_amplitude": 3.0, "noise_sigma": 0.5},
            dashboard=True)
        add(eq, "humidity", "%RH", 300, 30, 60,
            {"baseline": 45.0, "diurnal_amplitude": 8.0, "noise_sigma": 1.5},
            dashboard=True)
    for eq in ids_by_type(store, CATEGORY_TYPES["drinking fountains"]):
        add(eq, "flow_rate", "GPM", 300, 0, 5,
            {"baseline": 1.2, "diurnal_amplitude": 0.5, "noise_sigma": 0.1},
            dashboard=True)
        add(eq, "load", "%", 300, 10, 100,
            {"baseline": 80.0, "diurnal_amplitude": 0.0, "noise_sigma": 0.5},
            dashboard=True)
    for eq in ids_by_type(store, PANEL_TYPE):
        add(eq, "load", "%", 300, 0, 90,
            {"baseline": 55.0, "diurnal_amplitude": 10.0, "noise_sigma": 2.0},
            dashboard=True)
        add(eq, "power", "kW", 300, 0, 400,
            {"baseline": 180.0, "diurnal_amplitude": 40.0, "noise_sigma": 8.0},
            dashboard=True)
    for eq in ids_by_type(store, CATEGORY_TYPES["elevators"]):
        add(eq, "runtime", "h", 300, 0, 1,
            {"baseline": 0.07, "diurnal_amplitude": 0.01, "noise_sigma": 0.005},
            dashboard=True)
    for eq in ids_by_type(store, CATEGORY_TYPES["generator"]):
        add(eq, "runtime", "h", 300, 0, 1,
            {"baseline": 0.02, "diurnal_amplitude": 0.01, "noise_sigma": 0.003},
            dashboard=True)
        add(eq, "fuel_level", "%", 300, 20, 100,
            {"baseline": 85.0, "diurnal_amplitude": 0.0, "noise_sigma": 0.2},
            dashboard=True, rule=(20, 100))
        add(eq, "load", "%", 300, 0, 90,
            {"baseline": 40.0, "diurnal_amplitude": 8.0, "noise_sigma": 2.0},
            dashboard=True)
    for eq in ids_by_type(store, CATEGORY_TYPES["lighting fixtures"])[:6]:
        add(eq, "power", "kW", 300, 0, 2,
            {"baseline": 0.4, "diurnal_amplitude": 0.15, "noise_sigma": 0.05},
            dashboard=True)
    for eq in ids_by_type(store, CATEGORY_TYPES["transformers"]):
        add(eq, "voltage", "V", 300, 456, 504,
            {"baseline": 480.0, "diurnal_amplitude": 2.0, "noise_sigma": 0.5},
            dashboard=True)
        add(eq, "amperage", "A", 300, 0, 400,
            {"baseline": 120.0, "diurnal_amplitude": 15.0, "noise_sigma": 3.0},
            dashboard=True)
    for eq in ids_by_type(store, CATEGORY_TYPES["toilets"])[:4]:
        add(eq, "flow_rate", "GPM", 300, 0, 6,
            {"baseline": 1.8, "diurnal_amplitude": 0.6, "noise_sigma": 0.15},
            dashboard=True)
    for eq in ids_by_type(store, CATEGORY_TYPES["hot water pumps"]):
        add(eq, "pressure", "psi", 300, 40, 80,
            {"baseline": 60.0, "diurnal_amplitude": 3.0, "noise_sigma": 1.0},
            dashboard=True, rule=(40, 80))
        add(eq, "flow_rate", "GPM", 300, 0, 400,
            {"baseline": 150.0, "diurnal_amplitude": 25.0, "noise_sigma": 6.0},
            dashboard=True)

    return sensor_rows, rule_rows


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    space_rows, equip_rows = build_inventory()
    write_csv(OUT_DIR / "spaces.csv", SPACE_HEADER, space_rows)
    write_csv(OUT_DIR / "equipment.csv", EQUIPMENT_HEADER, equip_rows)

    store = TwinStore()
    report = load_inventory(store, OUT_DIR / "spaces.csv", OUT_DIR / "equipment.csv")
    rejecting = [v for v in report.violations if v.rejects()]
    if rejecting:
        raise SystemExit(f"generated inventory is invalid: {rejecting[:3]}")

    sensor_rows, rule_rows = build_bindings(store)
    write_csv(OUT_DIR / "sensors.csv", SENSOR_HEADER, sensor_rows)
    write_csv(OUT_DIR / "rules.csv", RULE_HEADER, rule_rows)

    policy_rows = [[pid, target, kind, json.dumps(tasks), freq, start,
                    json.dumps(resources)]
                   for pid, target, kind, tasks, freq, start, resources in POLICIES]
    write_csv(OUT_DIR / "policies.csv", POLICY_HEADER, policy_rows)

    counted = sum(1 for r in sensor_rows if r[7] == "false")
    manifest = {
        "version": SEED_VERSION,
        "space_count": len(ROOMS),
        "equipment_counts": {cat: len(spots) for cat, _d, spots, _p in EQUIPMENT_PLAN},
        "sensor_binding_count": counted,
        "policy_count": len(POLICIES),
    }
    with open(OUT_DIR / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")

    total = sum(manifest["equipment_counts"].values())
    print(f"wrote {len(space_rows)} spaces, {len(equip_rows)} equipment rows "
          f"({total} counted + {len(equip_rows) - total} support), "
          f"{len(sensor_rows)} sensors ({counted} counted), "
          f"{len(rule_rows)} rules, {len(POLICIES)} policies -> {OUT_DIR}")


if __name__ == "__main__":
    main()
