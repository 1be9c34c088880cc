"""Persist sessions as line-delimited records and export them as triples.

The canonical store is one JSON object per line (schema_version 1), which
round-trips sessions losslessly and keeps output byte-deterministic. The
triple export is a derived view over the same sessions using the WAM
vocabulary, in the triple syntax the ontology loader accepts.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator
from urllib.parse import quote

from .errors import IoFailure, MalformedRecord, SchemaMismatch
from .logs import Parameter
from .ontology import RDF_TYPE, WAM, XSD_DATETIME, XSD_INTEGER
from .sessions import BrowsingEvent, Session, iso_instant, parse_instant

SCHEMA_VERSION = 1

SESSION_IRI_PREFIX = "http://greenlinkeddata.org/log/session/"


def session_to_record(session: Session) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "id": session.id,
        "user": session.user,
        "start_time": iso_instant(session.start_time),
        "end_time": iso_instant(session.end_time),
        "events": [
            {
                "order": ev.order,
                "full_url": ev.full_url,
                "base_url": ev.base_url,
                "params": [[p.name, p.value] for p in ev.params],
                "time": iso_instant(ev.time),
                "content_types": sorted(ev.content_types),
                "function_types": sorted(ev.function_types),
                "synthetic": ev.synthetic,
                "referrer": ev.referrer,
            }
            for ev in session.events
        ],
    }


def record_to_session(record: dict) -> Session:
    events = tuple(
        BrowsingEvent(
            full_url=ev["full_url"],
            base_url=ev["base_url"],
            params=tuple(Parameter(name, value) for name, value in ev["params"]),
            time=parse_instant(ev["time"]),
            order=ev["order"],
            content_types=frozenset(ev["content_types"]),
            function_types=frozenset(ev["function_types"]),
            synthetic=ev["synthetic"],
            referrer=ev["referrer"],
        )
        for ev in record["events"]
    )
    return Session(
        id=record["id"],
        user=record["user"],
        start_time=parse_instant(record["start_time"]),
        end_time=parse_instant(record["end_time"]),
        events=events,
    )


def write_sessions(path, sessions: Iterable[Session]) -> int:
    """Write one record per line, in input order; returns the count."""
    count = 0
    try:
        with open(path, "w", encoding="utf-8") as handle:
            for session in sessions:
                record = session_to_record(session)
                handle.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
                handle.write("\n")
                count += 1
    except OSError as exc:
        raise IoFailure(path, exc) from exc
    return count


def read_sessions(path) -> list[Session]:
    """Inverse of write_sessions."""
    sessions: list[Session] = []
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise IoFailure(path, exc) from exc
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(line_number, f"invalid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise MalformedRecord(line_number, "record is not an object")
        version = record.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaMismatch(line_number, version)
        try:
            sessions.append(record_to_session(record))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedRecord(line_number, repr(exc)) from exc
    return sessions


def session_iri(session_id: str) -> str:
    return SESSION_IRI_PREFIX + quote(session_id, safe="")


def event_iri(session_id: str, order: int) -> str:
    return f"{session_iri(session_id)}/event/{order}"


def _literal(value: str, datatype: str | None = None) -> str:
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    suffix = f"^^<{datatype}>" if datatype else ""
    return f'"{escaped}"{suffix}'


def iter_session_triples(sessions: Iterable[Session]) -> Iterator[str]:
    """Yield the triple lines describing the sessions, in a fixed order.

    Per session: its typing and user, one hasEvent link per event; per
    event: Event typing, full and base URL, time, order, one triple per
    content and function type; finally StartEvent/EndEvent typing of the
    first and last event.
    """
    for session in sessions:
        sid = session_iri(session.id)
        yield f"<{sid}> <{RDF_TYPE}> <{WAM.SESSION}> ."
        yield f"<{sid}> <{WAM.USER_PROP}> {_literal(session.user)} ."
        for ev in session.events:
            yield f"<{sid}> <{WAM.HAS_EVENT}> <{event_iri(session.id, ev.order)}> ."
        for ev in session.events:
            eid = event_iri(session.id, ev.order)
            yield f"<{eid}> <{RDF_TYPE}> <{WAM.EVENT}> ."
            yield f"<{eid}> <{WAM.FULL_URL}> {_literal(ev.full_url)} ."
            yield f"<{eid}> <{WAM.BASE_URL}> {_literal(ev.base_url)} ."
            yield f"<{eid}> <{WAM.TIME}> {_literal(iso_instant(ev.time), XSD_DATETIME)} ."
            yield f"<{eid}> <{WAM.ORDER}> {_literal(str(ev.order), XSD_INTEGER)} ."
            for cls in sorted(ev.content_types):
                yield f"<{eid}> <{WAM.CONTENT_TYPE_PROP}> <{cls}> ."
            for cls in sorted(ev.function_types):
                yield f"<{eid}> <{WAM.FUNCTION_TYPE_PROP}> <{cls}> ."
        first = event_iri(session.id, session.events[0].order)
        last = event_iri(session.id, session.events[-1].order)
        yield f"<{first}> <{RDF_TYPE}> <{WAM.START_EVENT}> ."
        yield f"<{last}> <{RDF_TYPE}> <{WAM.END_EVENT}> ."


def count_triples(sessions: Iterable[Session]) -> int:
    return sum(1 for _ in iter_session_triples(sessions))


def export_triples(sessions: Iterable[Session], path) -> int:
    """Write the triple view of the sessions; returns the triple count."""
    count = 0
    try:
        with open(path, "w", encoding="utf-8") as handle:
            for line in iter_session_triples(sessions):
                handle.write(line)
                handle.write("\n")
                count += 1
    except OSError as exc:
        raise IoFailure(path, exc) from exc
    return count
