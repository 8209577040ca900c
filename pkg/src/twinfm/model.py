"""Domain records stored in the twin: spaces, equipment, documents, sensors,
readings, alarm rules/records, maintenance policies and jobs.

Every record (de)serializes to a plain-dict payload with primitive values so
the event log and snapshots stay language-neutral JSON.  Timestamps are UTC
at second precision, rendered RFC3339 with a ``Z`` suffix.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from datetime import date, datetime, timezone
from enum import Enum
from typing import Any, Optional


# --- time helpers -------------------------------------------------------------

def utcnow() -> datetime:
    """Current UTC time truncated to whole seconds."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def iso(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_iso(text: str) -> datetime:
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def epoch_s(dt: datetime) -> int:
    return int(dt.timestamp())


def from_epoch_s(seconds: int) -> datetime:
    return datetime.fromtimestamp(seconds, tz=timezone.utc)


# --- enums --------------------------------------------------------------------

class Discipline(str, Enum):
    MECHANICAL = "mechanical"
    ELECTRICAL = "electrical"
    PLUMBING = "plumbing"
    CONVEYING = "conveying"
    COMMUNICATION = "communication"


class DocKind(str, Enum):
    CUT_SHEET = "cut_sheet"
    OPERATION_MANUAL = "operation_manual"
    WARRANTY = "warranty"
    PRODUCT_SPECIFICATION = "product_specification"
    OTHER = "other"


class SensorKind(str, Enum):
    TEMPERATURE = "temperature"
    HUMIDITY = "humidity"
    CO = "co"
    CO2 = "co2"
    OCCUPANCY = "occupancy"
    PRESSURE = "pressure"
    FLOW_RATE = "flow_rate"
    POWER = "power"
    VOLTAGE = "voltage"
    AMPERAGE = "amperage"
    RUNTIME = "runtime"
    FUEL_LEVEL = "fuel_level"
    LOAD = "load"


class ReadingSource(str, Enum):
    SIMULATED = "simulated"
    LIVE = "live"


class AlarmState(str, Enum):
    RAISED = "raised"
    ACKNOWLEDGED = "acknowledged"
    CLEARED = "cleared"


class JobStatus(str, Enum):
    OPEN = "open"
    ONGOING = "ongoing"
    COMPLETED = "completed"
    VERIFIED = "verified"


class JobOrigin(str, Enum):
    PREVENTIVE = "preventive"
    REACTIVE = "reactive"


class AssigneeRole(str, Enum):
    TECHNICIAN = "technician"
    CUSTODIAN = "custodian"


# --- building inventory ---------------------------------------------------------

@dataclass
class SpaceRecord:
    """One room: Omniclass table-13 category, display name, unique tag."""

    room_category: str
    room_name: str
    room_tag: str
    room_augment_id: str = ""
    floor_level: str = ""

    def to_payload(self) -> dict:
        return asdict(self)

    @classmethod
    def from_payload(cls, d: dict) -> "SpaceRecord":
        return cls(**d)


@dataclass
class EquipmentItem:
    """One classified asset with its required twin-binding properties.

    ``dashboard_support`` marks items added only so a dashboard has a data
    source; they are excluded from inventory count verification.
    """

    omniclass_system: str
    omniclass_type: str
    space_instance: str
    discipline: str = ""
    augment_id_type: str = ""
    augment_id_instance: str = ""
    om_properties: dict = field(default_factory=dict)
    document_ids: list = field(default_factory=list)
    dashboard_support: bool = False

    def to_payload(self) -> dict:
        return asdict(self)

    @classmethod
    def from_payload(cls, d: dict) -> "EquipmentItem":
        return cls(**d)


@dataclass
class DocumentMeta:
    doc_id: str
    kind: str
    title: str
    uri_or_path: str = ""
    uploaded_at: Optional[datetime] = None

    def to_payload(self) -> dict:
        d = asdict(self)
        d["uploaded_at"] = iso(self.uploaded_at) if self.uploaded_at else None
        return d

    @classmethod
    def from_payload(cls, d: dict) -> "DocumentMeta":
        d = dict(d)
        if d.get("uploaded_at"):
            d["uploaded_at"] = parse_iso(d["uploaded_at"])
        return cls(**d)


# --- telemetry ------------------------------------------------------------------

#: Sensor polling interval bounds, seconds (1 to 5 minutes).
INTERVAL_MIN_S = 60
INTERVAL_MAX_S = 300


@dataclass
class SensorSpec:
    """A sensor bound to one equipment item, with its simulation profile.

    ``sim_profile`` holds either ``{baseline, diurnal_amplitude, noise_sigma}``
    or, for occupancy, a schedule ``{occupied_start_hour, occupied_end_hour,
    occupied_probability, vacant_probability}``.
    """

    sensor_id: str
    bound_equipment: str
    kind: str
    unit: str
    interval_s: int
    low: float
    high: float
    sim_profile: dict = field(default_factory=dict)
    dashboard_support: bool = False
    live_capable: bool = False

    def to_payload(self) -> dict:
        return asdict(self)

    @classmethod
    def from_payload(cls, d: dict) -> "SensorSpec":
        return cls(**d)


@dataclass
class SensorReading:
    sensor_id: str
    at: datetime
    value: float
    source: str = ReadingSource.SIMULATED.value

    def to_payload(self) -> dict:
        return {
            "sensor_id": self.sensor_id,
            "at": iso(self.at),
            "value": self.value,
            "source": self.source,
        }

    @classmethod
    def from_payload(cls, d: dict) -> "SensorReading":
        return cls(
            sensor_id=d["sensor_id"],
            at=parse_iso(d["at"]),
            value=d["value"],
            source=d.get("source", ReadingSource.SIMULATED.value),
        )


# --- alarms ----------------------------------------------------------------------

@dataclass
class AlarmRule:
    """Threshold rule: values outside [low, high] count toward raising.

    Debounce counts are consecutive samples required to raise / clear.
    """

    sensor_id: str
    low: float
    high: float
    raise_debounce: int = 1
    clear_debounce: int = 3

    def to_payload(self) -> dict:
        return asdict(self)

    @classmethod
    def from_payload(cls, d: dict) -> "AlarmRule":
        return cls(**d)


@dataclass
class AlarmRecord:
    alarm_id: str
    sensor_id: str
    state: str
    raised_at: datetime
    trigger_value: float
    acked_at: Optional[datetime] = None
    cleared_at: Optional[datetime] = None
    actor: Optional[str] = None

    def to_payload(self) -> dict:
        return {
            "alarm_id": self.alarm_id,
            "sensor_id": self.sensor_id,
            "state": self.state,
            "raised_at": iso(self.raised_at),
            "trigger_value": self.trigger_value,
            "acked_at": iso(self.acked_at) if self.acked_at else None,
            "cleared_at": iso(self.cleared_at) if self.cleared_at else None,
            "actor": self.actor,
        }

    @classmethod
    def from_payload(cls, d: dict) -> "AlarmRecord":
        return cls(
            alarm_id=d["alarm_id"],
            sensor_id=d["sensor_id"],
            state=d["state"],
            raised_at=parse_iso(d["raised_at"]),
            trigger_value=d["trigger_value"],
            acked_at=parse_iso(d["acked_at"]) if d.get("acked_at") else None,
            cleared_at=parse_iso(d["cleared_at"]) if d.get("cleared_at") else None,
            actor=d.get("actor"),
        )


# --- maintenance -------------------------------------------------------------------

@dataclass
class MaintenancePolicy:
    """Recurring work definition assigned to an equipment type or a room."""

    policy_id: str
    target: str                    # canonical equipment type code, or room_tag
    target_kind: str               # "equipment_type" | "room"
    tasks: list
    frequency_days: int
    start_date: date
    resources: list = field(default_factory=list)

    def to_payload(self) -> dict:
        return {
            "policy_id": self.policy_id,
            "target": self.target,
            "target_kind": self.target_kind,
            "tasks": list(self.tasks),
            "frequency_days": self.frequency_days,
            "start_date": self.start_date.isoformat(),
            "resources": list(self.resources),
        }

    @classmethod
    def from_payload(cls, d: dict) -> "MaintenancePolicy":
        d = dict(d)
        d["start_date"] = date.fromisoformat(d["start_date"])
        return cls(**d)


@dataclass
class JobComment:
    at: datetime
    actor: str
    text: str

    def to_payload(self) -> dict:
        return {"at": iso(self.at), "actor": self.actor, "text": self.text}

    @classmethod
    def from_payload(cls, d: dict) -> "JobComment":
        return cls(at=parse_iso(d["at"]), actor=d["actor"], text=d["text"])


@dataclass
class MaintenanceJob:
    """One work item, preventive (from a policy occurrence) or reactive."""

    job_id: str
    origin: str
    target: str                    # augment_id_instance or room_tag
    target_kind: str               # "equipment" | "room"
    description: str
    assignee_role: str
    status: str = JobStatus.OPEN.value
    assignee: Optional[str] = None
    policy_id: Optional[str] = None
    occurrence_date: Optional[date] = None
    due_date: Optional[date] = None
    created_at: Optional[datetime] = None
    resources: list = field(default_factory=list)
    comments: list = field(default_factory=list)   # list[JobComment]

    def to_payload(self) -> dict:
        return {
            "job_id": self.job_id,
            "origin": self.origin,
            "target": self.target,
            "target_kind": self.target_kind,
            "description": self.description,
            "assignee_role": self.assignee_role,
            "status": self.status,
            "assignee": self.assignee,
            "policy_id": self.policy_id,
            "occurrence_date": self.occurrence_date.isoformat() if self.occurrence_date else None,
            "due_date": self.due_date.isoformat() if self.due_date else None,
            "created_at": iso(self.created_at) if self.created_at else None,
            "resources": list(self.resources),
            "comments": [c.to_payload() for c in self.comments],
        }

    @classmethod
    def from_payload(cls, d: dict) -> "MaintenanceJob":
        return cls(
            job_id=d["job_id"],
            origin=d["origin"],
            target=d["target"],
            target_kind=d["target_kind"],
            description=d["description"],
            assignee_role=d["assignee_role"],
            status=d["status"],
            assignee=d.get("assignee"),
            policy_id=d.get("policy_id"),
            occurrence_date=date.fromisoformat(d["occurrence_date"]) if d.get("occurrence_date") else None,
            due_date=date.fromisoformat(d["due_date"]) if d.get("due_date") else None,
            created_at=parse_iso(d["created_at"]) if d.get("created_at") else None,
            resources=list(d.get("resources", [])),
            comments=[JobComment.from_payload(c) for c in d.get("comments", [])],
        )


def enum_values(enum_cls: type[Enum]) -> set[str]:
    return {e.value for e in enum_cls}
