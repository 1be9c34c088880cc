"""Corpus statistics: day counts, start categories, shares, SPARQL usage."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from fractions import Fraction

import pytest

from sessionlens.enrich import INFORMATIVE, SPARQL_QUERY
from sessionlens.errors import EmptyCorpus
from sessionlens.logs import Parameter
from sessionlens.sessions import BrowsingEvent, make_session
from sessionlens.stats import compute_stats, render_stats_text, round_fraction, stats_record
from sessionlens.store import count_triples

JUL1 = datetime(2009, 7, 1, tzinfo=timezone.utc)
ENGINES = frozenset({"http://google.com", "http://bing.com"})
SITES = frozenset({"http://dbpedia.org", "http://data.semanticweb.org"})


def simple_session(user, start, first_base, synthetic_first=False, sparql=False):
    events = [
        BrowsingEvent(
            full_url=first_base + ("/search?q=x" if synthetic_first else "/p"),
            base_url=first_base,
            params=(Parameter("q", "x"),) if synthetic_first else (),
            time=start,
            order=1,
            function_types=frozenset({INFORMATIVE}),
            synthetic=synthetic_first,
        )
    ]
    if sparql:
        events.append(
            BrowsingEvent(
                full_url="http://dbpedia.org/sparql?query=SELECT",
                base_url="http://dbpedia.org",
                params=(Parameter("query", "SELECT"),),
                time=start + timedelta(seconds=60),
                order=2,
                function_types=frozenset({SPARQL_QUERY}),
            )
        )
    return make_session(user, events)


def spread_corpus(count, days):
    """count sessions whose start dates cover exactly `days` calendar days."""
    sessions = []
    for k in range(count):
        start = JUL1 + timedelta(days=k % days, seconds=17 + (k // days) * 40)
        sessions.append(simple_session(f"u{k}", start, "http://dbpedia.org"))
    return sessions


class TestDayCountsAndAverage:
    def test_table_average_2831_sessions_over_12_days(self):
        report = compute_stats(spread_corpus(2831, 12), ENGINES, "calendar_days")
        assert report.monitored_days == 12
        assert report.avg_sessions_per_day == Fraction(2831, 12)
        assert abs(float(report.avg_sessions_per_day) - 235.92) <= 0.005
        assert float(round_fraction(report.avg_sessions_per_day, 2)) == 235.92

    def test_average_times_days_is_exact(self):
        report = compute_stats(spread_corpus(250, 7), ENGINES)
        assert report.avg_sessions_per_day * report.monitored_days == report.session_count

    def test_span_days_uses_elapsed_time(self):
        a = simple_session("u1", JUL1 + timedelta(hours=13), "http://dbpedia.org")
        b = simple_session("u2", JUL1 + timedelta(days=11, hours=11), "http://dbpedia.org")
        calendar = compute_stats([a, b], ENGINES, "calendar_days")
        span = compute_stats([a, b], ENGINES, "span_days")
        assert calendar.monitored_days == 12
        assert span.monitored_days == 11  # 10.9 days of elapsed time, rounded up

    def test_single_instant_corpus(self):
        report = compute_stats([simple_session("u", JUL1, "http://dbpedia.org")], ENGINES, "span_days")
        assert report.monitored_days == 1

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            compute_stats(spread_corpus(3, 2), ENGINES, "fortnights")

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            compute_stats([], ENGINES)


class TestStartCategories:
    def test_all_engine_started(self):
        sessions = [
            simple_session(f"u{k}", JUL1 + timedelta(hours=k), "http://google.com", True)
            for k in range(5)
        ]
        report = compute_stats(sessions, ENGINES, site_domains=SITES)
        assert report.pct_start_engine == 100
        assert report.per_engine_shares == (("http://google.com", Fraction(100)),)

    def test_three_way_split_and_sum(self):
        sessions = (
            [simple_session(f"e{k}", JUL1, "http://google.com", True) for k in range(3)]
            + [simple_session(f"b{k}", JUL1, "http://bing.com", True) for k in range(2)]
            + [simple_session(f"d{k}", JUL1, "http://dbpedia.org") for k in range(4)]
            + [simple_session(f"o{k}", JUL1, "http://nytimes.com") for k in range(1)]
        )
        report = compute_stats(sessions, ENGINES, site_domains=SITES)
        assert report.pct_start_engine == Fraction(500, 10)
        assert report.pct_start_direct == Fraction(400, 10)
        assert report.pct_start_other == Fraction(100, 10)
        assert report.pct_start_engine + report.pct_start_direct + report.pct_start_other == 100
        assert dict(report.per_engine_shares) == {
            "http://google.com": Fraction(300, 5),
            "http://bing.com": Fraction(200, 5),
        }
        assert sum(share for _, share in report.per_engine_shares) == 100

    def test_without_site_registry_any_real_first_event_is_direct(self):
        report = compute_stats(
            [simple_session("u", JUL1, "http://nytimes.com")], ENGINES, site_domains=None
        )
        assert report.pct_start_direct == 100


class TestSparqlShare:
    def test_fifteen_percent(self):
        sessions = [
            simple_session(f"u{k}", JUL1 + timedelta(minutes=k), "http://dbpedia.org", sparql=k < 3)
            for k in range(20)
        ]
        report = compute_stats(sessions, ENGINES)
        assert report.pct_sparql_sessions == 15


class TestReportOutput:
    def test_triple_count_matches_export(self):
        sessions = spread_corpus(10, 3)
        report = compute_stats(sessions, ENGINES)
        assert report.triple_count == count_triples(sessions)

    def test_round_half_up(self):
        assert str(round_fraction(Fraction(5725, 100), 1)) == "57.3"
        assert str(round_fraction(Fraction(235916, 1000), 2)) == "235.92"
        assert str(round_fraction(Fraction(1, 3), 1)) == "0.3"

    def test_text_and_record(self):
        report = compute_stats(spread_corpus(24, 12), ENGINES)
        text = render_stats_text(report)
        assert "sessions: 24" in text
        assert "avg sessions/day: 2.00" in text
        record = stats_record(report)
        import json

        payload = json.loads(record)
        assert payload["session_count"] == 24
        assert payload["monitored_days"] == 12
        assert payload["avg_sessions_per_day"] == 2.0
