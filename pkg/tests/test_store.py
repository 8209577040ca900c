"""Twin graph: upserts, queries, replay determinism, referential integrity."""

from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinfm.errors import (
    BadFilter,
    BindingConflict,
    DuplicateTagConflict,
    GapInSequence,
    MalformedCategory,
    MalformedCode,
    UnknownEquipment,
    UnknownSpace,
)
from twinfm.model import DocumentMeta, EquipmentItem, SensorSpec, SpaceRecord
from twinfm.store import TwinStore
from twinfm.telemetry import bind_sensor

OFFICE = SpaceRecord(room_category="13-55 11 00 Office Spaces",
                     room_name="Main Study Area", room_tag="Room 101")
RESTROOM = SpaceRecord(room_category="13-23 17 00 Restroom",
                       room_name="Men's RRs", room_tag="Restroom A")


def ahu(space_tag: str = "Room 101", instance: str = "") -> EquipmentItem:
    return EquipmentItem(
        omniclass_system="23-33 00 00 HVAC",
        omniclass_type="23-33 13 00 Air Handling Units",
        space_instance=space_tag,
        discipline="mechanical",
        augment_id_instance=instance,
    )


def lighting(space_tag: str = "Room 101", instance: str = "") -> EquipmentItem:
    return EquipmentItem(
        omniclass_system="23-04 50 Electrical",
        omniclass_type="23-35 47 00 Electrical Lighting",
        space_instance=space_tag,
        discipline="electrical",
        augment_id_instance=instance,
    )


def sensor_spec(kind: str = "temperature", interval: int = 300) -> SensorSpec:
    return SensorSpec(sensor_id="", bound_equipment="", kind=kind, unit="F",
                      interval_s=interval, low=60, high=80,
                      sim_profile={"baseline": 72.0, "diurnal_amplitude": 3.0,
                                   "noise_sigma": 0.5})


# --- basics ------------------------------------------------------------------

def test_empty_store(store):
    assert store.last_seq == 0
    assert store.spaces == {}
    assert store.equipment == {}
    assert store.snapshot()["last_seq"] == 0


def test_upsert_space_stores_and_returns_tag(store):
    assert store.upsert_space(OFFICE) == "Room 101"
    assert store.upsert_space(RESTROOM) == "Restroom A"
    assert store.spaces["Room 101"].room_name == "Main Study Area"
    assert store.last_seq == 2


def test_upsert_space_idempotent_appends_no_event(store):
    store.upsert_space(OFFICE)
    seq = store.last_seq
    store.upsert_space(SpaceRecord(**OFFICE.to_payload()))
    assert store.last_seq == seq


def test_upsert_space_conflict_without_overwrite(store):
    store.upsert_space(OFFICE)
    changed = SpaceRecord(room_category=OFFICE.room_category,
                          room_name="Renamed", room_tag="Room 101")
    with pytest.raises(DuplicateTagConflict):
        store.upsert_space(changed)
    store.upsert_space(changed, overwrite=True)
    assert store.spaces["Room 101"].room_name == "Renamed"


def test_upsert_space_requires_table_13(store):
    bad = SpaceRecord(room_category="23-33 13 00 Air Handling Units",
                      room_name="X", room_tag="RoomX")
    with pytest.raises(MalformedCategory):
        store.upsert_space(bad)


def test_upsert_equipment_and_pending_key(store):
    store.upsert_space(OFFICE)
    returned = store.upsert_equipment(ahu())
    assert returned == ""  # no instance id yet: pre-assignment
    pending = store.pending_equipment()
    assert len(pending) == 1
    _ordinal, key = pending[0]
    assert key.startswith("~")
    assert store.equipment[key].augment_id_instance == ""
    key2 = store.upsert_equipment(lighting(instance="EQ-00042"))
    assert key2 == "EQ-00042"


def test_upsert_equipment_unknown_space(store):
    with pytest.raises(UnknownSpace):
        store.upsert_equipment(ahu(space_tag="Room 999"))


def test_upsert_equipment_rejects_non_table_23(store):
    store.upsert_space(OFFICE)
    bad = ahu()
    bad.omniclass_type = "13-55 11 00 Office Spaces"
    with pytest.raises(MalformedCode):
        store.upsert_equipment(bad)


def test_documents_attach_and_order(store):
    store.upsert_space(OFFICE)
    store.upsert_equipment(lighting(instance="EQ-00001"))
    d1 = store.attach_document("EQ-00001", DocumentMeta(
        doc_id="", kind="cut_sheet", title="Generator cut sheet"))
    d2 = store.attach_document("EQ-00001", DocumentMeta(
        doc_id="", kind="warranty", title="Warranty"))
    assert [d1, d2] == ["DOC-00001", "DOC-00002"]
    docs = store.documents_for("EQ-00001")
    assert [d.title for d in docs] == ["Generator cut sheet", "Warranty"]
    with pytest.raises(UnknownEquipment):
        store.attach_document("EQ-09999", DocumentMeta(
            doc_id="", kind="other", title="X"))


# --- queries ------------------------------------------------------------------

def populate(store) -> None:
    store.upsert_space(OFFICE)
    store.upsert_space(RESTROOM)
    store.upsert_equipment(ahu(instance="EQ-00002"))
    store.upsert_equipment(lighting(instance="EQ-00001"))
    store.upsert_equipment(lighting(space_tag="Restroom A", instance="EQ-00003"))


def test_query_by_room_tag(store):
    populate(store)
    hits = store.query("by_room_tag", "Room 101")
    assert [e.augment_id_instance for e in hits] == ["EQ-00001", "EQ-00002"]


def test_query_by_discipline(store):
    populate(store)
    hits = store.query("by_discipline", "electrical")
    assert [e.augment_id_instance for e in hits] == ["EQ-00001", "EQ-00003"]


def test_query_by_omniclass_prefix_universal(store):
    populate(store)
    assert len(store.query("by_omniclass_prefix", "23-")) == 3
    assert len(store.query("by_omniclass_prefix", "23-35 47")) == 2


def test_query_by_augment_id(store):
    populate(store)
    hits = store.query("by_augment_id", "EQ-00002")
    assert len(hits) == 1 and hits[0].omniclass_type == "23-33 13 00 Air Handling Units"


def test_query_unknown_selector(store):
    with pytest.raises(BadFilter):
        store.query("by_vibe", "chill")


def test_query_no_match_is_empty(store):
    populate(store)
    assert store.query("by_room_tag", "Room 404") == []


# --- replay and snapshots -------------------------------------------------------

def script_some_history(store) -> None:
    populate(store)
    sid = bind_sensor(store, "EQ-00002", sensor_spec())
    from twinfm.model import SensorReading
    at = datetime(2024, 3, 1, tzinfo=timezone.utc)
    store.commit_reading(SensorReading(sensor_id=sid, at=at, value=72.0))


def test_replay_reproduces_snapshot(store):
    script_some_history(store)
    twin = TwinStore.replay(store.events)
    assert twin.snapshot_json() == store.snapshot_json()


def test_replay_twice_identical(store):
    script_some_history(store)
    a = TwinStore.replay(store.events).snapshot_json()
    b = TwinStore.replay(store.events).snapshot_json()
    assert a == b


def test_snapshot_plus_tail_equals_full_replay(store):
    script_some_history(store)
    k = len(store.events) // 2
    head = TwinStore.replay(store.events[:k])
    resumed = TwinStore.from_snapshot(head.snapshot())
    resumed.resume(store.events[k:])
    assert resumed.snapshot_json() == store.snapshot_json()


def test_replay_rejects_gap(store):
    script_some_history(store)
    events = list(store.events)
    del events[1]
    with pytest.raises(GapInSequence):
        TwinStore.replay(events)


def test_file_backed_restart_round_trip(tmp_path):
    path = tmp_path / "log.jsonl"
    first = TwinStore.open(path)
    script_some_history(first)
    snap = first.snapshot_json()
    first.close()
    second = TwinStore.open(path)
    assert second.snapshot_json() == snap
    second.close()


def test_events_are_append_only(store):
    script_some_history(store)
    seqs = [e.seq for e in store.events]
    assert seqs == list(range(1, len(seqs) + 1))
    with pytest.raises(AttributeError):
        store.events[0].kind = "tampered"  # frozen dataclass


# --- referential integrity under random operation sequences ----------------------

def assert_integrity(store: TwinStore) -> None:
    for item in store.equipment.values():
        assert item.space_instance in store.spaces
        for doc_id in item.document_ids:
            assert doc_id in store.documents
    for spec in store.sensors.values():
        assert spec.bound_equipment in store.equipment
    ids = [e.augment_id_instance for e in store.equipment.values()
           if e.augment_id_instance]
    assert len(ids) == len(set(ids))


_TAGS = ["Room 101", "Room 102", "Restroom A", "Room 999"]  # 999 never created

ops = st.lists(
    st.one_of(
        st.tuples(st.just("space"), st.sampled_from(_TAGS[:3])),
        st.tuples(st.just("equipment"), st.sampled_from(_TAGS)),
        st.tuples(st.just("doc"), st.integers(0, 4)),
        st.tuples(st.just("bind"), st.integers(0, 4)),
    ),
    min_size=1, max_size=25,
)


@settings(max_examples=200)
@given(ops)
def test_random_sequences_preserve_integrity(op_list):
    store = TwinStore()
    made_ids: list[str] = []
    counter = 0
    for op in op_list:
        before = store.snapshot_json()
        try:
            if op[0] == "space":
                store.upsert_space(SpaceRecord(
                    room_category="13-55 11 00 Office Spaces",
                    room_name=f"Space {op[1]}", room_tag=op[1]))
            elif op[0] == "equipment":
                counter += 1
                key = store.upsert_equipment(
                    lighting(space_tag=op[1], instance=f"EQ-{counter:05d}"))
                made_ids.append(key)
            elif op[0] == "doc":
                target = made_ids[op[1]] if op[1] < len(made_ids) else "EQ-99999"
                store.attach_document(target, DocumentMeta(
                    doc_id="", kind="other", title="doc"))
            else:
                target = made_ids[op[1]] if op[1] < len(made_ids) else "EQ-99999"
                bind_sensor(store, target, sensor_spec())
        except (UnknownSpace, UnknownEquipment, DuplicateTagConflict,
                BindingConflict):
            # invalid ops must reject atomically: no state change, no event
            assert store.snapshot_json() == before
        assert_integrity(store)
