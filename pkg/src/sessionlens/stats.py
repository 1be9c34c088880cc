"""Exploratory corpus statistics: where sessions start, engine shares,
SPARQL usage, and volume per day.

All ratios are kept as exact fractions; rendering rounds percentages to
one decimal place (half-up) and the per-day average to two.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Sequence

from .enrich import SPARQL_QUERY
from .errors import EmptyCorpus
from .ontology import local_name
from .sessions import Session
from .store import count_triples

DAY_COUNT_MODES = ("calendar_days", "span_days")


@dataclass(frozen=True)
class StatsReport:
    session_count: int
    monitored_days: int
    avg_sessions_per_day: Fraction
    pct_start_engine: Fraction
    pct_start_direct: Fraction
    pct_start_other: Fraction
    per_engine_shares: tuple[tuple[str, Fraction], ...]
    pct_sparql_sessions: Fraction
    triple_count: int


def _monitored_days(sessions: Sequence[Session], mode: str) -> int:
    starts = [s.start_time for s in sessions]
    ends = [s.end_time for s in sessions]
    if mode == "calendar_days":
        # inclusive span of calendar dates between first and last session start
        return (max(starts).date() - min(starts).date()).days + 1
    if mode == "span_days":
        elapsed = (max(ends) - min(starts)).total_seconds()
        return max(1, math.ceil(elapsed / 86400))
    raise ValueError(f"unknown day count mode {mode!r}")


def _is_sparql(session: Session) -> bool:
    for event in session.events:
        for ft in event.function_types:
            if ft == SPARQL_QUERY or local_name(ft) == "SparqlQuery":
                return True
    return False


def compute_stats(
    sessions: Iterable[Session],
    engine_domains: frozenset[str] | set[str],
    day_count_mode: str = "calendar_days",
    site_domains: frozenset[str] | set[str] | None = None,
) -> StatsReport:
    """Aggregate the corpus into a StatsReport.

    A session starts at an engine when its first event (synthetic referrer
    events included) sits on an engine domain; it is direct when the first
    event is a real request to one of ``site_domains`` (any non-synthetic
    first event when site_domains is None); everything else is "other".
    """
    sessions = list(sessions)
    if not sessions:
        raise EmptyCorpus()
    if day_count_mode not in DAY_COUNT_MODES:
        raise ValueError(f"unknown day count mode {day_count_mode!r}")

    total = len(sessions)
    engine_starts: dict[str, int] = {}
    direct = 0
    sparql = 0
    for session in sessions:
        first = session.events[0]
        if first.base_url in engine_domains:
            engine_starts[first.base_url] = engine_starts.get(first.base_url, 0) + 1
        elif not first.synthetic and (site_domains is None or first.base_url in site_domains):
            direct += 1
        if _is_sparql(session):
            sparql += 1

    engine_total = sum(engine_starts.values())
    shares = tuple(
        (base, Fraction(count * 100, engine_total))
        for base, count in sorted(engine_starts.items())
    )
    days = _monitored_days(sessions, day_count_mode)
    return StatsReport(
        session_count=total,
        monitored_days=days,
        avg_sessions_per_day=Fraction(total, days),
        pct_start_engine=Fraction(engine_total * 100, total),
        pct_start_direct=Fraction(direct * 100, total),
        pct_start_other=Fraction((total - engine_total - direct) * 100, total),
        per_engine_shares=shares,
        pct_sparql_sessions=Fraction(sparql * 100, total),
        triple_count=count_triples(sessions),
    )


def round_fraction(value: Fraction, places: int) -> Decimal:
    """Round half-up at the given number of decimal places."""
    quantum = Decimal(1).scaleb(-places)
    return (Decimal(value.numerator) / Decimal(value.denominator)).quantize(
        quantum, rounding=ROUND_HALF_UP
    )


def render_stats_text(report: StatsReport) -> str:
    lines = [
        f"sessions: {report.session_count}",
        f"monitored days: {report.monitored_days}",
        f"avg sessions/day: {round_fraction(report.avg_sessions_per_day, 2)}",
        f"start at engine: {round_fraction(report.pct_start_engine, 1)}%",
        f"start direct: {round_fraction(report.pct_start_direct, 1)}%",
        f"start other: {round_fraction(report.pct_start_other, 1)}%",
    ]
    for base, share in report.per_engine_shares:
        lines.append(f"engine share {base}: {round_fraction(share, 1)}%")
    lines.append(f"sessions with SPARQL: {round_fraction(report.pct_sparql_sessions, 1)}%")
    lines.append(f"triples: {report.triple_count}")
    return "\n".join(lines)


def stats_record(report: StatsReport) -> str:
    """Machine-readable single-line record of the report."""
    payload = {
        "session_count": report.session_count,
        "monitored_days": report.monitored_days,
        "avg_sessions_per_day": float(round_fraction(report.avg_sessions_per_day, 2)),
        "pct_start_engine": float(round_fraction(report.pct_start_engine, 1)),
        "pct_start_direct": float(round_fraction(report.pct_start_direct, 1)),
        "pct_start_other": float(round_fraction(report.pct_start_other, 1)),
        "per_engine_shares": {
            base: float(round_fraction(share, 1)) for base, share in report.per_engine_shares
        },
        "pct_sparql_sessions": float(round_fraction(report.pct_sparql_sessions, 1)),
        "triple_count": report.triple_count,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))
