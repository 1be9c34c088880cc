"""Log parsing, URL decomposition and bot heuristics."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, strategies as st

from sessionlens.errors import InvalidTimestamp, MalformedLine, NotAbsoluteUrl
from sessionlens.logs import (
    BotPolicy,
    LogEntry,
    Parameter,
    decompose_url,
    filter_bots,
    format_log_line,
    is_bot,
    parse_log_line,
    reassemble_url,
)

COMBINED = (
    '127.0.0.1 - u1 [01/Jul/2009:17:11:49 +0000] "GET /page/Lyon HTTP/1.1" 200 512 '
    '"http://google.com/search?q=lyon" "Mozilla/5.0"'
)
COMMON = '127.0.0.1 - u1 [01/Jul/2009:17:11:49 +0000] "GET /page/Lyon HTTP/1.1" 200 512'


class TestParseLogLine:
    def test_combined_fields(self):
        entry = parse_log_line(COMBINED, "combined", server_base="http://dbpedia.org")
        assert entry.user_id == "u1"
        assert entry.url == "http://dbpedia.org/page/Lyon"
        assert entry.referrer == "http://google.com/search?q=lyon"
        assert entry.user_agent == "Mozilla/5.0"
        assert entry.timestamp == datetime(2009, 7, 1, 17, 11, 49, tzinfo=timezone.utc)

    def test_common_has_no_referrer_or_agent(self):
        entry = parse_log_line(COMMON, "common", server_base="http://dbpedia.org")
        assert entry.referrer is None
        assert entry.user_agent is None

    def test_day_out_of_range(self):
        bad = COMBINED.replace("01/Jul", "32/Jul")
        with pytest.raises(InvalidTimestamp):
            parse_log_line(bad, "combined", server_base="http://dbpedia.org")

    def test_dash_referrer_and_agent_absent(self):
        line = COMMON + ' "-" "-"'
        entry = parse_log_line(line, "combined", server_base="http://dbpedia.org")
        assert entry.referrer is None and entry.user_agent is None

    def test_host_used_when_authuser_missing(self):
        line = COMBINED.replace(" - u1 ", " - - ")
        entry = parse_log_line(line, "combined", server_base="http://dbpedia.org")
        assert entry.user_id == "127.0.0.1"

    def test_combined_line_rejected_as_common(self):
        with pytest.raises(MalformedLine):
            parse_log_line(COMBINED, "common", server_base="http://dbpedia.org")

    def test_garbage_rejected(self):
        with pytest.raises(MalformedLine):
            parse_log_line("not a log line", "combined")

    def test_relative_target_needs_server_base(self):
        with pytest.raises(MalformedLine):
            parse_log_line(COMBINED, "combined")

    def test_absolute_target_kept(self):
        line = COMBINED.replace("GET /page/Lyon", "GET http://other.org/x")
        entry = parse_log_line(line, "combined", server_base="http://dbpedia.org")
        assert entry.url == "http://other.org/x"

    def test_utc_conversion(self):
        line = COMBINED.replace("+0000", "+0200")
        entry = parse_log_line(line, "combined", server_base="http://dbpedia.org")
        assert entry.timestamp == datetime(2009, 7, 1, 15, 11, 49, tzinfo=timezone.utc)


class TestDecomposeUrl:
    def test_single_query_parameter(self):
        parts = decompose_url("http://avis.com/res?resForm.pickUpLocation=Lyon")
        assert parts.base == "http://avis.com"
        assert parts.path == "/res"
        assert parts.params == (Parameter("resForm.pickUpLocation", "Lyon"),)

    def test_no_query_string(self):
        parts = decompose_url("http://dbpedia.org/page/Lyon")
        assert parts.base == "http://dbpedia.org"
        assert parts.path == "/page/Lyon"
        assert parts.params == ()

    def test_percent_decoding_and_blank_values(self):
        parts = decompose_url("http://x.org/p?a=1&b=%20c")
        assert parts.params == (Parameter("a", "1"), Parameter("b", " c"))
        bare = decompose_url("http://x.org/p?flag")
        assert bare.params == (Parameter("flag", ""),)

    def test_host_lowercased_default_port_stripped(self):
        assert decompose_url("HTTP://DBpedia.ORG:80/p").base == "http://dbpedia.org"
        assert decompose_url("https://x.org:443/p").base == "https://x.org"
        assert decompose_url("http://x.org:8080/p").base == "http://x.org:8080"

    def test_not_absolute(self):
        for bad in ("/page/Lyon", "dbpedia.org/page", ""):
            with pytest.raises(NotAbsoluteUrl):
                decompose_url(bad)

    def test_reassembly_idempotent(self):
        urls = [
            "http://avis.com/res?resForm.pickUpLocation=Lyon",
            "http://x.org/p?a=1&b=%20c&c",
            "http://dbpedia.org/page/Lyon",
        ]
        for url in urls:
            once = reassemble_url(decompose_url(url))
            assert reassemble_url(decompose_url(once)) == once
            assert decompose_url(once) == decompose_url(url)


_hosts = st.from_regex(r"[a-z][a-z0-9]{0,8}\.(org|com)", fullmatch=True)
_segments = st.lists(st.from_regex(r"[A-Za-z0-9_\-]{1,6}", fullmatch=True), max_size=3)
_names = st.from_regex(r"[a-zA-Z][a-zA-Z0-9_.]{0,6}", fullmatch=True)
_values = st.text(alphabet="abc XYZ019/&=%", max_size=8)


@st.composite
def absolute_urls(draw):
    host = draw(_hosts)
    path = "".join("/" + seg for seg in draw(_segments))
    pairs = draw(st.lists(st.tuples(_names, _values), max_size=3))
    url = f"http://{host}{path}"
    if pairs:
        from urllib.parse import urlencode

        url += "?" + urlencode(pairs)
    return url


@given(absolute_urls())
def test_decompose_reassemble_fixpoint(url):
    once = reassemble_url(decompose_url(url))
    assert reassemble_url(decompose_url(once)) == once


_instants = st.integers(min_value=0, max_value=2**31 - 1).map(
    lambda s: datetime(1980, 1, 1, tzinfo=timezone.utc) + timedelta(seconds=s % (50 * 365 * 86400))
)
_safe_text = st.from_regex(r"[A-Za-z0-9_.:/?=&%\-]{1,20}", fullmatch=True)


@st.composite
def log_entries(draw, with_extras: bool):
    referrer = user_agent = None
    if with_extras:
        referrer = draw(st.none() | _safe_text.map(lambda s: "http://r.org/" + s))
        user_agent = draw(st.none() | st.from_regex(r"[A-Za-z0-9/. ()]{1,20}", fullmatch=True))
    return LogEntry(
        user_id=draw(_safe_text),
        timestamp=draw(_instants),
        url="http://" + draw(_hosts) + "/" + draw(_safe_text),
        referrer=referrer,
        user_agent=user_agent,
        source_line=1,
    )


@given(log_entries(with_extras=True))
def test_parse_format_roundtrip_combined(entry):
    assert parse_log_line(format_log_line(entry, "combined"), "combined") == entry


@given(log_entries(with_extras=False))
def test_parse_format_roundtrip_common(entry):
    assert parse_log_line(format_log_line(entry, "common"), "common") == entry


def _entry(agent, when=None, user="u1", line=1):
    return LogEntry(
        user_id=user,
        timestamp=when or datetime(2009, 7, 1, tzinfo=timezone.utc),
        url="http://x.org/p",
        user_agent=agent,
        source_line=line,
    )


class TestIsBot:
    def test_substring_match(self):
        assert is_bot(_entry("Googlebot/2.1"), BotPolicy(("bot",)))

    def test_no_match(self):
        assert not is_bot(_entry("Mozilla/5.0"), BotPolicy(("bot", "crawler")))

    def test_missing_agent(self):
        assert is_bot(_entry(None), BotPolicy(("bot",), treat_missing_agent_as_bot=True))
        assert not is_bot(_entry(None), BotPolicy(("bot",)))

    @given(
        st.text(alphabet="abcXYZ/ .", max_size=20),
        st.lists(st.text(alphabet="abcxyz", min_size=1, max_size=4), max_size=4),
        st.text(alphabet="abcxyz", min_size=1, max_size=4),
    )
    def test_monotone_in_substrings(self, agent, subs, extra):
        before = is_bot(_entry(agent), BotPolicy(tuple(subs)))
        after = is_bot(_entry(agent), BotPolicy(tuple(subs) + (extra,)))
        assert after or not before  # adding a substring never flips true -> false


def _window_oracle(times, limit):
    # brute-force: does any 60 s window hold strictly more than limit hits?
    return any(
        sum(1 for u in times if timedelta(0) <= u - t < timedelta(seconds=60)) > limit
        for t in times
    )


class TestRequestRate:
    def test_burst_flags_every_entry_of_the_user(self):
        t0 = datetime(2009, 7, 1, tzinfo=timezone.utc)
        burst = [_entry("Mozilla/5.0", t0 + timedelta(seconds=i // 4), "hot", i + 1)
                 for i in range(200)]  # 200 requests inside 50 seconds
        calm = [_entry("Mozilla/5.0", t0 + timedelta(seconds=90 * i), "calm", 300 + i)
                for i in range(10)]
        policy = BotPolicy(("bot",), max_requests_per_minute=120)

        assert _window_oracle([e.timestamp for e in burst], 120)
        assert not _window_oracle([e.timestamp for e in calm], 120)

        humans, bots = filter_bots(burst + calm, policy)
        assert [e.user_id for e in bots] == ["hot"] * 200
        assert [e.user_id for e in humans] == ["calm"] * 10

    def test_rate_only_applies_with_history(self):
        policy = BotPolicy(("bot",), max_requests_per_minute=1)
        assert not is_bot(_entry("Mozilla/5.0"), policy)
