"""sessionlens: semantic browsing sessions from web-server logs.

The pipeline: parse access logs, drop crawler traffic, group entries into
per-user sessions, synthesize events for cross-domain referrers, type
every event against per-domain ontologies, persist the result, and answer
temporal-semantic queries over the stored sessions.
"""

from .engine import (
    SessionAutomaton,
    StateContext,
    answer,
    build_automaton,
    eval_atom,
    eval_session_constraints,
    oracle_eval,
    satisfying_states,
)
from .enrich import FunctionRule, classify_function, enrich_event, enrich_sessions
from .errors import SessionlensError
from .logs import (
    BotPolicy,
    DEFAULT_BOT_POLICY,
    LogEntry,
    Parameter,
    UrlParts,
    decompose_url,
    filter_bots,
    format_log_line,
    is_bot,
    parse_log_line,
    reassemble_url,
)
from .ontology import (
    WAM,
    WAM_NS,
    MappingRule,
    Ontology,
    class_membership,
    load_ontology,
    resolve_resource,
)
from .query import Query, desugar, format_query, parse_query
from .sessions import (
    BrowsingEvent,
    Session,
    insert_referrer_events,
    make_session,
    sessionize,
)
from .stats import StatsReport, compute_stats
from .store import export_triples, read_sessions, write_sessions

__version__ = "0.1.0"

__all__ = [
    "BotPolicy",
    "BrowsingEvent",
    "DEFAULT_BOT_POLICY",
    "FunctionRule",
    "LogEntry",
    "MappingRule",
    "Ontology",
    "Parameter",
    "Query",
    "Session",
    "SessionAutomaton",
    "SessionlensError",
    "StateContext",
    "StatsReport",
    "UrlParts",
    "WAM",
    "WAM_NS",
    "answer",
    "build_automaton",
    "class_membership",
    "classify_function",
    "compute_stats",
    "decompose_url",
    "desugar",
    "enrich_event",
    "enrich_sessions",
    "eval_atom",
    "eval_session_constraints",
    "export_triples",
    "filter_bots",
    "format_log_line",
    "format_query",
    "insert_referrer_events",
    "is_bot",
    "load_ontology",
    "make_session",
    "oracle_eval",
    "parse_log_line",
    "parse_query",
    "read_sessions",
    "reassemble_url",
    "resolve_resource",
    "satisfying_states",
    "sessionize",
    "write_sessions",
]
