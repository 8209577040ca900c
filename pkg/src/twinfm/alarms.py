"""Threshold alarms with debounce.

A reading outside [low, high] (closed interval: the bounds themselves are
in range) builds an out-of-range streak; in-range readings build a recovery
streak.  An alarm raises when the out streak reaches ``raise_debounce``
while no alarm is active for the sensor, and clears when the recovery
streak reaches ``clear_debounce`` while one is.  The step function is pure
so the evaluator behaves identically live and under replay.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .errors import IllegalState, UnknownAlarm
from .model import AlarmRecord, AlarmRule, AlarmState, iso

__all__ = ["RuleState", "step", "in_range", "acknowledge", "active_alarms"]


@dataclass(frozen=True)
class RuleState:
    """Consecutive-reading streaks for one sensor's rule."""

    streak_out: int = 0
    streak_in: int = 0


def in_range(rule: AlarmRule, value: float) -> bool:
    return rule.low <= value <= rule.high


def step(rule: AlarmRule, state: RuleState, value: float,
         active: bool) -> tuple[Optional[str], RuleState]:
    """Advance the debounce state by one reading.

    Returns ("raise" | "clear" | None, new state)."""
    if in_range(rule, value):
        state = replace(state, streak_in=state.streak_in + 1, streak_out=0)
        if active and state.streak_in >= rule.clear_debounce:
            return "clear", state
        return None, state
    state = replace(state, streak_out=state.streak_out + 1, streak_in=0)
    if not active and state.streak_out >= rule.raise_debounce:
        return "raise", state
    return None, state


def acknowledge(store, alarm_id: str, actor: str) -> AlarmRecord:
    """Mark a raised alarm as acknowledged by an actor."""
    with store.lock:
        rec = store.alarms.get(alarm_id)
        if rec is None:
            raise UnknownAlarm(f"no alarm {alarm_id!r}")
        if rec.state != AlarmState.RAISED.value:
            raise IllegalState(
                f"alarm {alarm_id} is {rec.state}, only raised alarms can be acknowledged")
        now = store.clock()
        store.commit("alarm_acked", {"alarm_id": alarm_id, "actor": actor,
                                     "at": iso(now)}, at=now)
        return store.alarms[alarm_id]


def active_alarms(store) -> list[AlarmRecord]:
    """Alarms not yet cleared, oldest raise first."""
    hits = [a for a in store.alarms.values() if a.state != AlarmState.CLEARED.value]
    return sorted(hits, key=lambda a: (a.raised_at, a.alarm_id))
