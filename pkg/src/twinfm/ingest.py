"""Inventory loading: CSV parsing, row validation, and id assignment.

Equipment arrives classified but unnumbered; ``assign_augment_ids`` fills
the blanks deterministically so any two loads of the same inventory agree.
Row problems are reported as violations, never exceptions — a bad row must
not take down the rest of the file.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import DuplicateTagConflict, FileUnreadable, HeaderMismatch, IdCollision
from .events import canonical_json
from .model import Discipline, EquipmentItem, SpaceRecord, enum_values
from .omniclass import canonical, parse_omniclass

logger = logging.getLogger(__name__)

SPACE_HEADER = ["Room_Category", "Room_Name", "Room_Tag", "Room_AugmentID", "Floor_Level"]
EQUIPMENT_HEADER = ["OMNICLASS_SYSTEM", "OMNICLASS_TYPE", "AugmentID_Type",
                    "AugmentID_Instance", "Space_Instance", "discipline", "om_properties"]

INSTANCE_ID_FMT = "EQ-{:05d}"
TYPE_ID_FMT = "TY-{:03d}"
SPACE_ID_FMT = "SP-{:03d}"

# first omniclass group of the system code -> discipline it normally implies
EXPECTED_DISCIPLINE = {
    "23-33": Discipline.MECHANICAL.value,
    "23-31": Discipline.PLUMBING.value,
    "23-35": Discipline.ELECTRICAL.value,
    "23-04": Discipline.ELECTRICAL.value,
    "23-23": Discipline.CONVEYING.value,
    "23-29": Discipline.COMMUNICATION.value,
}

# rules that reject the row; anything else is advisory
REJECTING_RULES = frozenset({
    "required-field", "malformed-code", "malformed-category", "dangling-space",
    "bad-discipline", "bad-om-json", "duplicate-tag", "id-collision",
})


@dataclass
class Violation:
    row: int
    rule: str
    message: str

    def rejects(self) -> bool:
        return self.rule in REJECTING_RULES


@dataclass
class IngestReport:
    spaces_loaded: int = 0
    equipment_loaded: int = 0
    violations: list[Violation] = field(default_factory=list)
    assigned_ids: int = 0

    def to_payload(self) -> dict:
        return {
            "spaces_loaded": self.spaces_loaded,
            "equipment_loaded": self.equipment_loaded,
            "violations": [asdict(v) for v in self.violations],
            "assigned_ids": self.assigned_ids,
        }


def read_csv_rows(path: str | Path, expected_header: list[str]) -> list[dict]:
    """Read a fixed-header CSV into row dicts (1-based data row numbers)."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise HeaderMismatch(f"{path}: empty file, expected header {expected_header}")
            if header != expected_header:
                raise HeaderMismatch(f"{path}: header {header} != expected {expected_header}")
            rows = []
            for cells in reader:
                if not any(c.strip() for c in cells):
                    continue
                padded = cells + [""] * (len(expected_header) - len(cells))
                rows.append(dict(zip(expected_header, padded)))
            return rows
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc


def validate_equipment(record: EquipmentItem, known_spaces) -> list[Violation]:
    """Check one equipment record; row number 0 (caller re-stamps it)."""
    out: list[Violation] = []

    def bad(rule: str, message: str) -> None:
        out.append(Violation(row=0, rule=rule, message=message))

    if not record.omniclass_system:
        bad("required-field", "OMNICLASS_SYSTEM is empty")
    if not record.omniclass_type:
        bad("required-field", "OMNICLASS_TYPE is empty")
    if not record.space_instance:
        bad("required-field", "Space_Instance is empty")
    for label, code in (("OMNICLASS_SYSTEM", record.omniclass_system),
                        ("OMNICLASS_TYPE", record.omniclass_type)):
        if not code:
            continue
        try:
            parsed = parse_omniclass(code)
            if parsed.table != 23:
                bad("malformed-code", f"{label} {code!r}: table {parsed.table}, expected 23")
        except Exception as exc:
            bad("malformed-code", f"{label} {code!r}: {exc}")
    if record.space_instance and record.space_instance not in known_spaces:
        bad("dangling-space", f"Space_Instance {record.space_instance!r} does not resolve")
    if record.discipline:
        if record.discipline not in enum_values(Discipline):
            bad("bad-discipline", f"discipline {record.discipline!r} not recognized")
        elif record.omniclass_system:
            try:
                head = canonical(record.omniclass_system)[:5]
            except Exception:
                head = ""
            expected = EXPECTED_DISCIPLINE.get(head)
            if expected is not None and expected != record.discipline:
                out.append(Violation(
                    row=0, rule="discipline-mismatch",
                    message=f"system {record.omniclass_system!r} implies {expected}, "
                            f"record says {record.discipline}"))
    return out


def _sort_type(code: str) -> str:
    try:
        return canonical(code)
    except Exception:
        return code


def _plan_instance_ids(pendings: list[tuple[int, str]]) -> dict[int, str]:
    """ordinal -> candidate instance id; pendings are (ordinal, type_code)."""
    ranked = sorted(pendings, key=lambda p: (_sort_type(p[1]), p[0]))
    return {ordinal: INSTANCE_ID_FMT.format(n)
            for n, (ordinal, _t) in enumerate(ranked, start=1)}


def _plan_type_ids(missing_types: set[str]) -> dict[str, str]:
    return {t: TYPE_ID_FMT.format(n)
            for n, t in enumerate(sorted(missing_types), start=1)}


def _plan_space_ids(missing_tags: list[str]) -> dict[str, str]:
    return {tag: SPACE_ID_FMT.format(n)
            for n, tag in enumerate(sorted(missing_tags), start=1)}


def assign_augment_ids(store) -> int:
    """Fill every empty AugmentID in the graph.

    Instances are numbered EQ-00001... over the id-less items sorted by
    (canonical omniclass_type, ingest order); each omniclass_type without an
    id gets the next TY-001...; id-less spaces get SP-001... by sorted
    room_tag.  Pre-set ids are preserved; a generated candidate equal to a
    pre-set id raises IdCollision.  Idempotent: a second run assigns nothing.
    """
    with store.lock:
        assigned = 0

        used_instance = {e.augment_id_instance for e in store.equipment.values()
                         if e.augment_id_instance}
        pendings = [(ordinal, store.equipment[key].omniclass_type)
                    for ordinal, key in store.pending_equipment()]
        instance_plan = _plan_instance_ids(pendings)
        for candidate in instance_plan.values():
            if candidate in used_instance:
                raise IdCollision(f"generated id {candidate} is already in use")

        type_map: dict[str, str] = {}
        for item in store.equipment.values():
            if item.augment_id_type:
                type_map.setdefault(_sort_type(item.omniclass_type), item.augment_id_type)
        missing_types = {_sort_type(i.omniclass_type) for i in store.equipment.values()
                         if not i.augment_id_type} - set(type_map)
        used_type_ids = set(type_map.values()) | {
            i.augment_id_type for i in store.equipment.values() if i.augment_id_type}
        type_plan = _plan_type_ids(missing_types)
        for candidate in type_plan.values():
            if candidate in used_type_ids:
                raise IdCollision(f"generated id {candidate} is already in use")
        type_map.update(type_plan)

        used_space = {s.room_augment_id for s in store.spaces.values() if s.room_augment_id}
        missing_tags = [s.room_tag for s in store.spaces.values() if not s.room_augment_id]
        space_plan = _plan_space_ids(missing_tags)
        for candidate in space_plan.values():
            if candidate in used_space:
                raise IdCollision(f"generated id {candidate} is already in use")

        for ordinal, key in store.pending_equipment():
            item = store.equipment[key]
            updated = EquipmentItem.from_payload(item.to_payload())
            updated.augment_id_instance = instance_plan[ordinal]
            if not updated.augment_id_type:
                updated.augment_id_type = type_map[_sort_type(item.omniclass_type)]
            store.upsert_equipment(updated, ordinal=ordinal)
            assigned += 1

        for item in list(store.equipment.values()):
            if item.augment_id_instance and not item.augment_id_type:
                updated = EquipmentItem.from_payload(item.to_payload())
                updated.augment_id_type = type_map[_sort_type(item.omniclass_type)]
                store.upsert_equipment(
                    updated, ordinal=store.equipment_ordinal(item.augment_id_instance))
                assigned += 1

        for tag, sp_id in space_plan.items():
            rec = store.spaces[tag]
            updated = SpaceRecord.from_payload(rec.to_payload())
            updated.room_augment_id = sp_id
            store.upsert_space(updated, overwrite=True)
            assigned += 1

        return assigned


def _space_from_row(row: dict) -> SpaceRecord:
    return SpaceRecord(
        room_category=row["Room_Category"].strip(),
        room_name=row["Room_Name"].strip(),
        room_tag=row["Room_Tag"].strip(),
        room_augment_id=row["Room_AugmentID"].strip(),
        floor_level=row["Floor_Level"].strip(),
    )


def _equipment_from_row(row: dict) -> tuple[EquipmentItem, Violation | None]:
    props = {}
    bad = None
    cell = row["om_properties"].strip()
    if cell:
        try:
            props = json.loads(cell)
            if not isinstance(props, dict):
                raise ValueError("not a JSON object")
        except ValueError as exc:
            props = {}
            bad = Violation(row=0, rule="bad-om-json", message=f"om_properties: {exc}")
    # reserved property: marks support items added for dashboards only,
    # which are excluded from inventory count checks
    dashboard_support = bool(props.pop("dashboard_support", False))
    item = EquipmentItem(
        omniclass_system=row["OMNICLASS_SYSTEM"].strip(),
        omniclass_type=row["OMNICLASS_TYPE"].strip(),
        augment_id_type=row["AugmentID_Type"].strip(),
        augment_id_instance=row["AugmentID_Instance"].strip(),
        space_instance=row["Space_Instance"].strip(),
        discipline=row["discipline"].strip(),
        om_properties=props,
        dashboard_support=dashboard_support,
    )
    return item, bad


def load_inventory(store, space_file: str | Path, equipment_file: str | Path,
                   strict: bool = False) -> IngestReport:
    """Load both CSVs, validate, assign ids, commit.

    Ids for id-less rows are computed before anything is committed, so
    reloading the same files is a no-op.  With strict=True a single rejecting
    violation prevents all commits.
    """
    report = IngestReport()
    space_rows = read_csv_rows(space_file, SPACE_HEADER)
    equip_rows = read_csv_rows(equipment_file, EQUIPMENT_HEADER)

    with store.lock:
        # -- spaces ---------------------------------------------------------
        space_records: list[tuple[int, SpaceRecord]] = []
        seen_tags: dict[str, SpaceRecord] = {}
        for n, row in enumerate(space_rows, start=1):
            rec = _space_from_row(row)
            if not rec.room_tag:
                report.violations.append(Violation(n, "required-field",
                                                   f"{space_file}: Room_Tag is empty"))
                continue
            try:
                parse_omniclass(rec.room_category)
            except Exception as exc:
                report.violations.append(Violation(n, "malformed-category",
                                                   f"{space_file}: {exc}"))
                continue
            existing = store.spaces.get(rec.room_tag)
            if not rec.room_augment_id and existing is not None:
                rec.room_augment_id = existing.room_augment_id
            prior = seen_tags.get(rec.room_tag)
            if prior is not None and canonical_json(prior.to_payload()) != canonical_json(rec.to_payload()):
                report.violations.append(Violation(n, "duplicate-tag",
                                                   f"{space_file}: Room_Tag {rec.room_tag!r} repeats with different data"))
                continue
            seen_tags[rec.room_tag] = rec
            space_records.append((n, rec))

        known_spaces = set(store.spaces) | {r.room_tag for _, r in space_records}

        # -- equipment ------------------------------------------------------
        accepted: list[tuple[int, EquipmentItem]] = []
        for n, row in enumerate(equip_rows, start=1):
            item, json_bad = _equipment_from_row(row)
            problems = [] if json_bad is None else [json_bad]
            problems += validate_equipment(item, known_spaces)
            for v in problems:
                v.row = n
                v.message = f"{equipment_file}: {v.message}"
            report.violations.extend(problems)
            if not any(v.rejects() for v in problems):
                accepted.append((n, item))

        # -- id planning ----------------------------------------------------
        base = store._next_ordinal
        used_instance = {e.augment_id_instance for e in store.equipment.values()
                         if e.augment_id_instance}
        used_instance |= {i.augment_id_instance for _, i in accepted if i.augment_id_instance}
        pendings = [(base + k, item.omniclass_type)
                    for k, (_n, item) in enumerate(accepted) if not item.augment_id_instance]
        pending_plan = _plan_instance_ids(pendings)

        type_map: dict[str, str] = {}
        for pool in (store.equipment.values(), (i for _, i in accepted)):
            for item in pool:
                if item.augment_id_type:
                    type_map.setdefault(_sort_type(item.omniclass_type), item.augment_id_type)
        missing_types = {_sort_type(i.omniclass_type) for _, i in accepted
                         if not i.augment_id_type} - set(type_map)
        type_plan = _plan_type_ids(missing_types)
        type_map.update(type_plan)

        missing_tags = [r.room_tag for _, r in space_records if not r.room_augment_id]
        used_space = {s.room_augment_id for s in store.spaces.values() if s.room_augment_id}
        space_plan = _plan_space_ids(missing_tags)

        # -- resolve rows to their final form --------------------------------
        planned: list[tuple[int, EquipmentItem, int | None]] = []
        for k, (n, item) in enumerate(accepted):
            final = EquipmentItem.from_payload(item.to_payload())
            ordinal: int | None = None
            if not final.augment_id_instance:
                ordinal = base + k
                final.augment_id_instance = pending_plan[ordinal]
            if not final.augment_id_type:
                final.augment_id_type = type_map[_sort_type(final.omniclass_type)]
            existing = store.equipment.get(final.augment_id_instance)
            if existing is not None:
                if canonical_json(existing.to_payload()) == canonical_json(final.to_payload()):
                    report.equipment_loaded += 1
                    continue
                if not item.augment_id_instance:
                    report.violations.append(Violation(
                        n, "id-collision",
                        f"{equipment_file}: computed id {final.augment_id_instance} "
                        "is taken by a different item"))
                    continue
            planned.append((n, final, ordinal))

        if strict and any(v.rejects() for v in report.violations):
            report.spaces_loaded = 0
            report.equipment_loaded = 0
            report.assigned_ids = 0
            return report

        # -- commit ----------------------------------------------------------
        for n, rec in space_records:
            final = SpaceRecord.from_payload(rec.to_payload())
            if not final.room_augment_id:
                candidate = space_plan[final.room_tag]
                if candidate in used_space:
                    report.violations.append(Violation(
                        n, "id-collision",
                        f"{space_file}: computed id {candidate} is taken"))
                    continue
                final.room_augment_id = candidate
                report.assigned_ids += 1
            try:
                store.upsert_space(final, overwrite=True)
                report.spaces_loaded += 1
            except DuplicateTagConflict as exc:  # pragma: no cover - overwrite on
                report.violations.append(Violation(n, "duplicate-tag", str(exc)))

        for n, final, ordinal in planned:
            store.upsert_equipment(final, ordinal=ordinal)
            report.equipment_loaded += 1
            if ordinal is not None:
                report.assigned_ids += 1

        return report
