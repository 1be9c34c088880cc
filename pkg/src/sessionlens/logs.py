"""Raw access-log records: line parsing, URL decomposition, bot heuristics.

Everything here is a pure function over immutable values and is safe to
call concurrently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Iterable, Sequence
from urllib.parse import parse_qsl, urlencode, urljoin, urlsplit

from .errors import InvalidTimestamp, MalformedLine, NotAbsoluteUrl

LOG_FORMATS = ("common", "combined")

# %h %l %u [%t] "%r" %>s %b, combined appends "%{Referer}i" "%{User-agent}i"
_COMMON_RE = re.compile(
    r'^(?P<host>\S+)\s+(?P<ident>\S+)\s+(?P<authuser>\S+)\s+\[(?P<time>[^\]]+)\]\s+'
    r'"(?P<request>[^"]*)"\s+(?P<status>\d{3}|-)\s+(?P<size>\d+|-)'
)
_FORMAT_RES = {
    "common": re.compile(_COMMON_RE.pattern + r"\s*$"),
    "combined": re.compile(
        _COMMON_RE.pattern + r'\s+"(?P<referrer>[^"]*)"\s+"(?P<agent>[^"]*)"\s*$'
    ),
}

_TIME_RE = re.compile(
    r"^(\d{1,2})/([A-Za-z]{3})/(\d{4}):(\d{2}):(\d{2}):(\d{2})\s+([+-])(\d{2})(\d{2})$"
)
_MONTHS = {
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "may": 5, "jun": 6,
    "jul": 7, "aug": 8, "sep": 9, "oct": 10, "nov": 11, "dec": 12,
}

_DEFAULT_PORTS = {"http": 80, "https": 443}


@dataclass(frozen=True)
class Parameter:
    """One name=value pair from a URL query string, percent-decoded."""

    name: str
    value: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("parameter name must be non-empty")


@dataclass(frozen=True)
class UrlParts:
    """An absolute URL split into base (scheme + host), path and parameters."""

    base: str
    path: str
    params: tuple[Parameter, ...]


@dataclass(frozen=True)
class LogEntry:
    """One raw access-log record after parsing."""

    user_id: str
    timestamp: datetime
    url: str
    referrer: str | None = None
    user_agent: str | None = None
    source_line: int = 1


@dataclass(frozen=True)
class BotPolicy:
    """Heuristics deciding which requests came from crawlers rather than people."""

    agent_substrings: tuple[str, ...]
    max_requests_per_minute: int | None = None
    treat_missing_agent_as_bot: bool = False


DEFAULT_BOT_POLICY = BotPolicy(
    agent_substrings=("bot", "crawler", "spider", "slurp", "curl", "wget"),
)


def _parse_clf_time(text: str, line_number: int | None) -> datetime:
    m = _TIME_RE.match(text.strip())
    if not m:
        raise InvalidTimestamp(text, line_number)
    day, mon, year, hh, mm, ss, sign, oh, om = m.groups()
    month = _MONTHS.get(mon.lower())
    if month is None:
        raise InvalidTimestamp(text, line_number)
    try:
        local = datetime(int(year), month, int(day), int(hh), int(mm), int(ss))
    except ValueError:
        raise InvalidTimestamp(text, line_number) from None
    offset = timedelta(hours=int(oh), minutes=int(om))
    if sign == "-":
        offset = -offset
    return (local - offset).replace(tzinfo=timezone.utc)


def parse_log_line(
    line: str,
    format: str = "combined",
    *,
    source_line: int = 1,
    server_base: str | None = None,
) -> LogEntry:
    """Parse one Common/Combined Log Format record into a LogEntry.

    Relative request targets are resolved against ``server_base`` (the URL
    of the server that produced the log); absolute targets are kept as is.
    Raises MalformedLine or InvalidTimestamp on bad input.
    """
    if format not in LOG_FORMATS:
        raise ValueError(f"unknown log format {format!r}")
    m = _FORMAT_RES[format].match(line)
    if not m:
        raise MalformedLine(f"does not match {format} log format", source_line)

    request = m.group("request").split()
    if len(request) != 3:
        raise MalformedLine(f"unparseable request field {m.group('request')!r}", source_line)
    target = request[1]
    if "://" in target:
        url = target
    elif server_base:
        url = urljoin(server_base.rstrip("/") + "/", target)
    else:
        raise MalformedLine(
            f"relative request target {target!r} and no server base configured",
            source_line,
        )

    authuser = m.group("authuser")
    user_id = authuser if authuser != "-" else m.group("host")
    timestamp = _parse_clf_time(m.group("time"), source_line)

    referrer = user_agent = None
    if format == "combined":
        ref = m.group("referrer")
        agent = m.group("agent")
        referrer = ref if ref not in ("", "-") else None
        user_agent = agent if agent not in ("", "-") else None

    return LogEntry(
        user_id=user_id,
        timestamp=timestamp,
        url=url,
        referrer=referrer,
        user_agent=user_agent,
        source_line=source_line,
    )


def format_log_line(entry: LogEntry, format: str = "combined") -> str:
    """Render a LogEntry back into a log line (inverse of parse_log_line).

    The user id is written in the host position and the URL as an absolute
    request target, so the round trip is exact for both formats.
    """
    if format not in LOG_FORMATS:
        raise ValueError(f"unknown log format {format!r}")
    ts = entry.timestamp.astimezone(timezone.utc).strftime("%d/%b/%Y:%H:%M:%S +0000")
    line = f'{entry.user_id} - - [{ts}] "GET {entry.url} HTTP/1.1" 200 -'
    if format == "combined":
        line += f' "{entry.referrer or "-"}" "{entry.user_agent or "-"}"'
    return line


def decompose_url(url: str) -> UrlParts:
    """Split an absolute URL into lowercased base, path and query parameters.

    Default ports are stripped from the base; query pairs keep their order
    of appearance and are percent-decoded; a name with no ``=`` yields an
    empty value. Fragments cannot occur in access-log request targets and
    are dropped.
    """
    parts = urlsplit(url)
    if not parts.scheme or not parts.netloc or parts.hostname is None:
        raise NotAbsoluteUrl(url)
    base = f"{parts.scheme}://{parts.hostname}"
    port = parts.port
    if port is not None and port != _DEFAULT_PORTS.get(parts.scheme):
        base += f":{port}"
    params = tuple(
        Parameter(name, value)
        for name, value in parse_qsl(parts.query, keep_blank_values=True)
        if name
    )
    return UrlParts(base=base, path=parts.path, params=params)


def reassemble_url(parts: UrlParts) -> str:
    """Inverse of decompose_url up to percent-encoding normalization."""
    url = parts.base + parts.path
    if parts.params:
        url += "?" + urlencode([(p.name, p.value) for p in parts.params])
    return url


def normalize_url(url: str) -> str:
    """Canonical form used for full-URL equality tests."""
    return reassemble_url(decompose_url(url))


def _rate_exceeded(times: Sequence[datetime], max_per_minute: int) -> bool:
    # any sliding 60 s window holding strictly more than max_per_minute hits
    ordered = sorted(times)
    window = timedelta(seconds=60)
    hi = 0
    for lo in range(len(ordered)):
        if hi < lo:
            hi = lo
        while hi < len(ordered) and ordered[hi] - ordered[lo] < window:
            hi += 1
        if hi - lo > max_per_minute:
            return True
    return False


def is_bot(
    entry: LogEntry,
    policy: BotPolicy,
    user_times: Sequence[datetime] | None = None,
) -> bool:
    """Decide whether one record came from a crawler.

    ``user_times`` are the timestamps of every request by this entry's user;
    when provided, the request-rate heuristic applies in addition to the
    user-agent checks.
    """
    agent = entry.user_agent
    if agent is None:
        if policy.treat_missing_agent_as_bot:
            return True
    else:
        lowered = agent.lower()
        if any(sub in lowered for sub in policy.agent_substrings):
            return True
    if policy.max_requests_per_minute is not None and user_times:
        return _rate_exceeded(user_times, policy.max_requests_per_minute)
    return False


def filter_bots(
    entries: Iterable[LogEntry], policy: BotPolicy
) -> tuple[list[LogEntry], list[LogEntry]]:
    """Partition entries into (human, bot) using the policy.

    Feeds per-user request times into is_bot so the rate heuristic sees the
    whole stream.
    """
    entries = list(entries)
    by_user: dict[str, list[datetime]] = {}
    for entry in entries:
        by_user.setdefault(entry.user_id, []).append(entry.timestamp)
    humans: list[LogEntry] = []
    bots: list[LogEntry] = []
    for entry in entries:
        if is_bot(entry, policy, by_user[entry.user_id]):
            bots.append(entry)
        else:
            humans.append(entry)
    return humans, bots
