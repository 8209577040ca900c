"""twinfm — an event-sourced digital twin for facility management.

The package models one building as a graph of classified spaces and
equipment, binds simulated or live sensors to it, evaluates threshold
alarms, schedules maintenance, and serves dashboards over REST + SSE.
Every mutation is an event in an append-only JSONL log; replaying the log
reproduces the graph exactly.
"""

from .errors import TwinError
from .events import SCHEMA_VERSION, TwinEvent
from .model import (
    AlarmRecord,
    AlarmRule,
    DocumentMeta,
    EquipmentItem,
    JobComment,
    MaintenanceJob,
    MaintenancePolicy,
    SensorReading,
    SensorSpec,
    SpaceRecord,
)
from .omniclass import OmniclassCode, canonical, parse_omniclass
from .store import TwinStore

__version__ = "0.1.0"

__all__ = [
    "AlarmRecord",
    "AlarmRule",
    "DocumentMeta",
    "EquipmentItem",
    "JobComment",
    "MaintenanceJob",
    "MaintenancePolicy",
    "OmniclassCode",
    "SCHEMA_VERSION",
    "SensorReading",
    "SensorSpec",
    "SpaceRecord",
    "TwinError",
    "TwinEvent",
    "TwinStore",
    "__version__",
    "canonical",
    "parse_omniclass",
]
