"""Group log entries into per-user sessions and synthesize referrer events."""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Iterable

from .errors import NotAbsoluteUrl
from .logs import LogEntry, Parameter, decompose_url

DEFAULT_IDLE_GAP_SECONDS = 1800


def iso_instant(dt: datetime) -> str:
    """UTC instant at second precision with a Z suffix."""
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_instant(text: str) -> datetime:
    return datetime.strptime(text, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)


@dataclass(frozen=True)
class BrowsingEvent:
    """One browsing step: the URL invoked, when, and its semantic types.

    ``content_types`` and ``function_types`` stay empty until enrichment.
    ``synthetic`` marks events reconstructed from a cross-domain referrer
    rather than observed in the log.
    """

    full_url: str
    base_url: str
    params: tuple[Parameter, ...]
    time: datetime
    order: int
    content_types: frozenset[str] = frozenset()
    function_types: frozenset[str] = frozenset()
    synthetic: bool = False
    referrer: str | None = None


@dataclass(frozen=True)
class Session:
    """An ordered run of browsing events by one user.

    The id is deterministic: ``user + "@" + start time`` in ISO-8601, which
    makes it a stable join key across files.
    """

    id: str
    user: str
    start_time: datetime
    end_time: datetime
    events: tuple[BrowsingEvent, ...]


def make_session(user: str, events: Iterable[BrowsingEvent]) -> Session:
    """Build a Session from ordered events, deriving id and time bounds."""
    evs = tuple(events)
    if not evs:
        raise ValueError("a session needs at least one event")
    for a, b in zip(evs, evs[1:]):
        if b.time < a.time:
            raise ValueError("session events must be time-ordered")
    start = evs[0].time
    return Session(
        id=f"{user}@{iso_instant(start)}",
        user=user,
        start_time=start,
        end_time=evs[-1].time,
        events=evs,
    )


def _event_from_entry(entry: LogEntry, order: int) -> BrowsingEvent:
    parts = decompose_url(entry.url)
    return BrowsingEvent(
        full_url=entry.url,
        base_url=parts.base,
        params=parts.params,
        time=entry.timestamp,
        order=order,
        referrer=entry.referrer,
    )


def sessionize(
    entries: Iterable[LogEntry],
    idle_gap_seconds: int = DEFAULT_IDLE_GAP_SECONDS,
) -> list[Session]:
    """Partition entries into sessions separated by idle gaps.

    Entries are grouped per user and ordered by (time, source_line); a gap
    strictly greater than ``idle_gap_seconds`` starts a new session. The
    result is sorted by (start time, user) so that permuting the input
    yields an identical session list.
    """
    by_user: dict[str, list[LogEntry]] = {}
    for entry in entries:
        by_user.setdefault(entry.user_id, []).append(entry)

    sessions: list[Session] = []
    for user, items in by_user.items():
        items.sort(key=lambda e: (e.timestamp, e.source_line))
        run: list[LogEntry] = []
        for entry in items:
            if run and (entry.timestamp - run[-1].timestamp).total_seconds() > idle_gap_seconds:
                sessions.append(_session_from_run(user, run))
                run = []
            run.append(entry)
        if run:
            sessions.append(_session_from_run(user, run))

    sessions.sort(key=lambda s: (s.start_time, s.user))
    return sessions


def _session_from_run(user: str, run: list[LogEntry]) -> Session:
    events = [_event_from_entry(entry, i) for i, entry in enumerate(run, start=1)]
    return make_session(user, events)


def insert_referrer_events(session: Session, known_domains: frozenset[str] | set[str]) -> Session:
    """Insert a synthetic event for every cross-domain referrer.

    An event whose referrer lives on a different base URL gets a synthetic
    event for the referrer inserted just before it, sharing its timestamp,
    unless the referrer base equals the previous event's base (the user
    simply navigated from a page we already hold). ``known_domains`` names
    the monitored corpus for callers that track it; the insertion rule
    itself is decided by the base-URL comparisons alone. Orders are
    reassigned contiguously.
    """
    out: list[BrowsingEvent] = []
    previous: BrowsingEvent | None = None
    for event in session.events:
        ref = event.referrer
        if ref is not None:
            try:
                ref_parts = decompose_url(ref)
            except NotAbsoluteUrl:
                ref_parts = None
            if ref_parts is not None and ref_parts.base != event.base_url:
                came_from_previous = previous is not None and ref_parts.base == previous.base_url
                if not came_from_previous:
                    out.append(
                        BrowsingEvent(
                            full_url=ref,
                            base_url=ref_parts.base,
                            params=ref_parts.params,
                            time=event.time,
                            order=0,  # reassigned below
                            synthetic=True,
                        )
                    )
        out.append(event)
        previous = event
    renumbered = [replace(ev, order=i) for i, ev in enumerate(out, start=1)]
    return make_session(session.user, renumbered)
