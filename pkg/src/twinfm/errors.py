"""Exception taxonomy for the twin platform.

Every operation-level failure raises a named subclass of TwinError so callers
(CLI, HTTP layer) can map failures to exit codes / status codes by type.
"""


class TwinError(Exception):
    """Base class for all platform errors."""


# --- classification / ingest ------------------------------------------------

class MalformedCode(TwinError):
    pass


class MalformedCategory(TwinError):
    pass


class DuplicateTagConflict(TwinError):
    pass


class UnknownSpace(TwinError):
    pass


class UnknownEquipment(TwinError):
    pass


class IdCollision(TwinError):
    pass


class FileUnreadable(TwinError):
    pass


class HeaderMismatch(TwinError):
    pass


# --- event log --------------------------------------------------------------

class GapInSequence(TwinError):
    pass


class UnknownEventKind(TwinError):
    pass


class CorruptLog(TwinError):
    pass


# --- scan planning ----------------------------------------------------------

class DegenerateFloor(TwinError):
    pass


# --- telemetry --------------------------------------------------------------

class IntervalOutOfRange(TwinError):
    pass


class OffGridTimestamp(TwinError):
    pass


class NoSensors(TwinError):
    pass


class UnboundSensor(TwinError):
    pass


class MalformedPayload(TwinError):
    pass


class UnitMismatch(TwinError):
    pass


class BindingConflict(TwinError):
    pass


# --- alarms -----------------------------------------------------------------

class SensorMismatch(TwinError):
    pass


class UnknownAlarm(TwinError):
    pass


class IllegalState(TwinError):
    pass


# --- maintenance ------------------------------------------------------------

class UnresolvedTarget(TwinError):
    pass


class BadFrequency(TwinError):
    pass


class InvertedHorizon(TwinError):
    pass


class EmptyDescription(TwinError):
    pass


class IllegalTransition(TwinError):
    pass


class UnknownJob(TwinError):
    pass


class EmptyComment(TwinError):
    pass


# --- reporting --------------------------------------------------------------

class InvertedWindow(TwinError):
    pass


class UnknownSystem(TwinError):
    pass


class UnknownMetric(TwinError):
    pass


# --- service ----------------------------------------------------------------

class BadFilter(TwinError):
    pass


class ManifestMismatch(TwinError):
    pass


# --- service ---------------------------------------------------------------

class PortInUse(TwinError):
    pass
