"""In-memory event log model and its resource- and case-ordered views.

An :class:`EventLog` is the single product of ingestion: a validated,
immutable sequence of events plus the alphabets derived from it. Events
without a resource are dropped at construction time (and counted), so
both the resource view and the case view describe the same filtered set
of events and their statistics stay comparable.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Mapping

from .errors import EmptyLogError, ValidationError


@dataclass(frozen=True)
class Event:
    """One executed activity: which case, which activity, who, and when.

    ``file_order`` is the event's position in the source file and is the
    tie-breaker for equal timestamps; it must be unique within one log.
    """

    case_id: str
    activity: str
    resource: str | None
    timestamp: datetime
    file_order: int

    def __post_init__(self) -> None:
        if not self.activity:
            raise ValidationError("event activity must be non-empty")
        if self.file_order < 0:
            raise ValidationError("file_order must be non-negative")


@dataclass(frozen=True)
class EventLog:
    """Validated events plus the activity/resource/case alphabets.

    Every retained event carries a resource; events lacking one are not
    stored but are counted in ``dropped_event_count``.
    """

    events: tuple[Event, ...]
    activity_alphabet: frozenset[str]
    resource_set: frozenset[str]
    case_set: frozenset[str]
    dropped_event_count: int = 0


@dataclass(frozen=True)
class ResourceView:
    """Chronologically ordered activity sequence per resource."""

    sequences: Mapping[str, tuple[str, ...]]


@dataclass(frozen=True)
class CaseView:
    """Chronologically ordered activity sequence per case."""

    sequences: Mapping[str, tuple[str, ...]]


def build_event_log(events: Iterable[Event]) -> EventLog:
    """Assemble an EventLog from raw events.

    Events whose resource is missing (None or empty) are dropped and
    counted. Raises :class:`ValidationError` on duplicate file_order and
    :class:`EmptyLogError` when no events are supplied at all.
    """
    kept: list[Event] = []
    dropped = 0
    seen_orders: set[int] = set()
    total = 0
    for ev in events:
        total += 1
        if ev.file_order in seen_orders:
            raise ValidationError(f"duplicate file_order {ev.file_order}")
        seen_orders.add(ev.file_order)
        if not ev.resource:
            dropped += 1
            continue
        kept.append(ev)
    if total == 0:
        raise EmptyLogError("no events in source")
    return EventLog(
        events=tuple(kept),
        activity_alphabet=frozenset(ev.activity for ev in kept),
        resource_set=frozenset(ev.resource for ev in kept if ev.resource),
        case_set=frozenset(ev.case_id for ev in kept),
        dropped_event_count=dropped,
    )


def _grouped_sequences(log: EventLog, key_of) -> dict[str, tuple[str, ...]]:
    if not log.events:
        raise EmptyLogError("event log has no events")
    groups: dict[str, list[Event]] = {}
    for ev in log.events:
        groups.setdefault(key_of(ev), []).append(ev)
    return {
        key: tuple(
            ev.activity
            for ev in sorted(groups[key], key=lambda e: (e.timestamp, e.file_order))
        )
        for key in sorted(groups)
    }


def resource_view(log: EventLog) -> ResourceView:
    """Group activities by resource, ordered by (timestamp, file_order)."""
    return ResourceView(_grouped_sequences(log, lambda ev: ev.resource))


def case_view(log: EventLog) -> CaseView:
    """Group activities by case, ordered by (timestamp, file_order).

    Events dropped at ingestion for missing resources are not restored,
    so case statistics describe the same filtered log as the resource view.
    """
    return CaseView(_grouped_sequences(log, lambda ev: ev.case_id))
