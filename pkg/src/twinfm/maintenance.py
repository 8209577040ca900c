"""Preventive policies, job generation, reactive jobs, and the job workflow.

Preventive occurrences fall on start_date + k*frequency_days; generation is
idempotent because each job is keyed by (policy, occurrence, target).  The
status graph is fixed: open -> ongoing -> completed -> verified, with
ongoing -> open (work paused) and completed -> ongoing (rework) as the only
backward edges.  Equipment jobs go to technicians, space jobs to custodians.
"""

from __future__ import annotations

import logging
from datetime import date, timedelta

from .errors import (
    BadFrequency,
    EmptyComment,
    EmptyDescription,
    IllegalTransition,
    InvertedHorizon,
    UnknownJob,
    UnresolvedTarget,
)
from .model import (
    AssigneeRole,
    JobComment,
    JobOrigin,
    JobStatus,
    MaintenanceJob,
    MaintenancePolicy,
    enum_values,
    iso,
)
from .omniclass import canonical
from .store import TwinStore, _next_numeric_id

logger = logging.getLogger(__name__)

LEGAL_TRANSITIONS = frozenset({
    (JobStatus.OPEN.value, JobStatus.ONGOING.value),
    (JobStatus.ONGOING.value, JobStatus.COMPLETED.value),
    (JobStatus.COMPLETED.value, JobStatus.VERIFIED.value),
    (JobStatus.ONGOING.value, JobStatus.OPEN.value),
    (JobStatus.COMPLETED.value, JobStatus.ONGOING.value),
})

TARGET_EQUIPMENT_TYPE = "equipment_type"
TARGET_EQUIPMENT = "equipment"
TARGET_ROOM = "room"


def _canonical_or_none(code: str) -> str | None:
    try:
        return canonical(code)
    except Exception:
        return None


def resolve_policy_target(store: TwinStore, target: str) -> tuple[str, list[str]]:
    """Classify a policy target: a room tag, or an equipment type code.

    Returns (target_kind, matching instance ids / [room_tag])."""
    if target in store.spaces:
        return TARGET_ROOM, [target]
    wanted = _canonical_or_none(target)
    if wanted is not None:
        matches = [e.augment_id_instance for e in store.equipment_list()
                   if e.augment_id_instance
                   and _canonical_or_none(e.omniclass_type) == wanted]
        if matches:
            return TARGET_EQUIPMENT_TYPE, matches
    raise UnresolvedTarget(f"target {target!r} matches no room and no equipment type")


def resolve_job_target(store: TwinStore, target: str) -> tuple[str, str]:
    """Classify a job target: equipment instance id or room tag -> role."""
    if target in store.equipment and store.equipment[target].augment_id_instance:
        return TARGET_EQUIPMENT, AssigneeRole.TECHNICIAN.value
    if target in store.spaces:
        return TARGET_ROOM, AssigneeRole.CUSTODIAN.value
    raise UnresolvedTarget(f"target {target!r} matches no equipment instance and no room")


def create_policy(store: TwinStore, policy: MaintenancePolicy) -> str:
    """Validate and store one maintenance policy (idempotent by content)."""
    if policy.frequency_days < 1:
        raise BadFrequency(f"frequency_days must be >= 1, got {policy.frequency_days}")
    target_kind, _ = resolve_policy_target(store, policy.target)
    with store.lock:
        if not policy.policy_id:
            policy.policy_id = _next_numeric_id("POL", 3, store.policies)
        policy.target_kind = target_kind
        existing = store.policies.get(policy.policy_id)
        if existing is not None and existing.to_payload() == policy.to_payload():
            return policy.policy_id
        store.commit("policy_created", {"policy": policy.to_payload()})
        return policy.policy_id


def occurrence_dates(start: date, frequency_days: int,
                     date_from: date, date_to: date) -> list[date]:
    """All start + k*frequency within [date_from, date_to], k >= 0."""
    if date_to < date_from:
        raise InvertedHorizon(f"horizon [{date_from}, {date_to}] is inverted")
    if frequency_days < 1:
        raise BadFrequency(f"frequency_days must be >= 1, got {frequency_days}")
    out = []
    if date_to < start:
        return out
    k = max(0, -(-(date_from - start).days // frequency_days))  # ceil division
    d = start + timedelta(days=k * frequency_days)
    while d <= date_to:
        if d >= date_from:
            out.append(d)
        d += timedelta(days=frequency_days)
    return out


def generate_jobs(store: TwinStore, date_from: date, date_to: date,
                  policy_id: str | None = None) -> list[MaintenanceJob]:
    """Expand policies into preventive jobs over the horizon (idempotent)."""
    if date_to < date_from:
        raise InvertedHorizon(f"horizon [{date_from}, {date_to}] is inverted")
    with store.lock:
        if policy_id is not None:
            if policy_id not in store.policies:
                raise UnresolvedTarget(f"no policy {policy_id!r}")
            policies = [store.policies[policy_id]]
        else:
            policies = [store.policies[k] for k in sorted(store.policies)]
        created: list[MaintenanceJob] = []
        for policy in policies:
            target_kind, targets = resolve_policy_target(store, policy.target)
            role = (AssigneeRole.CUSTODIAN.value if target_kind == TARGET_ROOM
                    else AssigneeRole.TECHNICIAN.value)
            for occurrence in occurrence_dates(policy.start_date, policy.frequency_days,
                                               date_from, date_to):
                for target in targets:
                    if store.preventive_key_exists(policy.policy_id,
                                                   occurrence.isoformat(), target):
                        continue
                    job = MaintenanceJob(
                        job_id=_next_numeric_id("JOB", 5, store.jobs),
                        origin=JobOrigin.PREVENTIVE.value,
                        target=target,
                        target_kind=(TARGET_ROOM if target_kind == TARGET_ROOM
                                     else TARGET_EQUIPMENT),
                        description="; ".join(policy.tasks),
                        assignee_role=role,
                        status=JobStatus.OPEN.value,
                        policy_id=policy.policy_id,
                        occurrence_date=occurrence,
                        due_date=occurrence,
                        created_at=store.clock(),
                        resources=[dict(r) for r in policy.resources],
                    )
                    store.commit("job_created", {"job": job.to_payload()})
                    created.append(store.jobs[job.job_id])
        return created


def create_reactive_job(store: TwinStore, target: str, description: str,
                        resources: list[dict] | None = None) -> MaintenanceJob:
    """Open a reactive job against an equipment instance or a room."""
    if not description or not description.strip():
        raise EmptyDescription("job description must be non-empty")
    target_kind, role = resolve_job_target(store, target)
    with store.lock:
        job = MaintenanceJob(
            job_id=_next_numeric_id("JOB", 5, store.jobs),
            origin=JobOrigin.REACTIVE.value,
            target=target,
            target_kind=target_kind,
            description=description.strip(),
            assignee_role=role,
            status=JobStatus.OPEN.value,
            created_at=store.clock(),
            resources=list(resources or []),
        )
        store.commit("job_created", {"job": job.to_payload()})
        return store.jobs[job.job_id]


def transition(store: TwinStore, job_id: str, to_status: str, actor: str,
               comment: str | None = None) -> MaintenanceJob:
    """Move a job along one legal workflow edge."""
    with store.lock:
        job = store.jobs.get(job_id)
        if job is None:
            raise UnknownJob(f"no job {job_id!r}")
        if to_status not in enum_values(JobStatus):
            raise IllegalTransition(f"{to_status!r} is not a job status")
        if (job.status, to_status) not in LEGAL_TRANSITIONS:
            raise IllegalTransition(f"{job.status} -> {to_status} is not allowed")
        now = store.clock()
        store.commit("job_transitioned", {
            "job_id": job_id,
            "from_status": job.status,
            "to_status": to_status,
            "actor": actor,
            "comment": (comment or "").strip() or None,
            "at": iso(now),
        }, at=now)
        return store.jobs[job_id]


def add_comment(store: TwinStore, job_id: str, actor: str, text: str) -> MaintenanceJob:
    """Append one immutable comment to a job's history."""
    if not text or not text.strip():
        raise EmptyComment("comment text must be non-empty")
    with store.lock:
        if job_id not in store.jobs:
            raise UnknownJob(f"no job {job_id!r}")
        now = store.clock()
        comment = JobComment(at=now, actor=actor, text=text.strip())
        store.commit("comment_added",
                     {"job_id": job_id, "comment": comment.to_payload()}, at=now)
        return store.jobs[job_id]


def list_jobs(store: TwinStore, status: str | None = None, role: str | None = None,
              target: str | None = None) -> list[MaintenanceJob]:
    """Filtered job listing in stable job_id order."""
    out = []
    for job_id in sorted(store.jobs):
        job = store.jobs[job_id]
        if status is not None and job.status != status:
            continue
        if role is not None and job.assignee_role != role:
            continue
        if target is not None and job.target != target:
            continue
        out.append(job)
    return out
