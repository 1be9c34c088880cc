"""Command line entry point wiring the whole pipeline.

Subcommands: ingest (logs -> session store), query (store -> matching
session ids), stats (store -> report, record and figures), export
(store -> triples). Results go to stdout, diagnostics to stderr, and the
exit code is zero exactly when no error occurred.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import EngineConfig, load_config, load_registry
from .enrich import enrich_sessions
from .errors import MalformedLine, SessionlensError
from .logs import filter_bots, parse_log_line
from .sessions import insert_referrer_events, sessionize
from .stats import compute_stats, render_stats_text, stats_record
from .store import export_triples, read_sessions, write_sessions
from .engine import answer
from .query import parse_query


def _apply_overrides(config: EngineConfig, args) -> EngineConfig:
    from dataclasses import replace

    if getattr(args, "format", None):
        config = replace(config, log_format=args.format)
    if getattr(args, "gap", None) is not None:
        config = replace(config, idle_gap_seconds=args.gap)
    return config


def run_ingest(config: EngineConfig, log_paths, out_path) -> dict:
    """Parse, clean, sessionize, enrich and store; returns the summary."""
    entries = []
    position = 0
    for log_path in log_paths:
        with open(log_path, "r", encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                position += 1
                entries.append(
                    parse_log_line(
                        line,
                        config.log_format,
                        source_line=position,
                        server_base=config.server_base_url,
                    )
                )
    humans, bots = filter_bots(entries, config.bot_policy)
    sessions = sessionize(humans, config.idle_gap_seconds)
    known = config.engine_domains | {spec.domain_base for spec in config.ontologies}
    sessions = [insert_referrer_events(s, known) for s in sessions]
    registry = load_registry(config)
    sessions = enrich_sessions(sessions, registry, config.engine_domains, config.function_rules)
    written = write_sessions(out_path, sessions)
    return {"read": len(entries), "bots": len(bots), "sessions": written}


def _cmd_ingest(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    summary = run_ingest(config, args.logs, args.out)
    print(json.dumps(summary, sort_keys=True, separators=(",", ":")))
    return 0


def _read_query_text(args) -> str:
    if args.query_file:
        return Path(args.query_file).read_text(encoding="utf-8").strip()
    if args.query is None:
        raise SessionlensError("no query given: pass it as an argument or via --query-file")
    return args.query


def _cmd_query(args) -> int:
    load_config(args.config)  # validates referenced files even though ids suffice
    sessions = read_sessions(args.store)
    query = parse_query(_read_query_text(args))
    matched = answer(query, sessions)
    for session_id in matched:
        print(session_id)
    print(f"count {len(matched)}")
    return 0


def _cmd_stats(args) -> int:
    config = load_config(args.config)
    sessions = read_sessions(args.store)
    report = compute_stats(
        sessions,
        config.engine_domains,
        config.day_count_mode,
        site_domains={spec.domain_base for spec in config.ontologies},
    )
    if args.out:
        out = Path(args.out)
        try:
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(stats_record(report) + "\n", encoding="utf-8")
        except OSError as exc:
            raise SessionlensError(f"cannot write {out}: {exc}") from exc
        if not args.no_figures:
            from .figures import render_stats_figures

            paths = render_stats_figures(report, out.parent, stem=out.stem)
            for path in paths:
                print(f"figure {path}", file=sys.stderr)
    print(render_stats_text(report))
    return 0


def _cmd_export(args) -> int:
    load_config(args.config)
    sessions = read_sessions(args.store)
    count = export_triples(sessions, args.out)
    print(json.dumps({"triples": count}, sort_keys=True, separators=(",", ":")))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sessionlens",
        description="Semantic sessions from web-server logs, with temporal queries",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="parse logs into an enriched session store")
    ingest.add_argument("--config", required=True)
    ingest.add_argument("--format", choices=("common", "combined"))
    ingest.add_argument("--gap", type=int, help="idle gap in seconds")
    ingest.add_argument("--out", required=True, help="session store to write")
    ingest.add_argument("logs", nargs="+", help="access log file(s)")
    ingest.set_defaults(func=_cmd_ingest)

    query = sub.add_parser("query", help="run a temporal query against a store")
    query.add_argument("--config", required=True)
    query.add_argument("--query-file", help="read the query text from a file")
    query.add_argument("store", help="session store written by ingest")
    query.add_argument("query", nargs="?", help="query text")
    query.set_defaults(func=_cmd_query)

    stats = sub.add_parser("stats", help="corpus statistics over a store")
    stats.add_argument("--config", required=True)
    stats.add_argument("--out", help="write a machine-readable record (figures alongside)")
    stats.add_argument("--no-figures", action="store_true")
    stats.add_argument("store")
    stats.set_defaults(func=_cmd_stats)

    export = sub.add_parser("export", help="export a store as triples")
    export.add_argument("--config", required=True)
    export.add_argument("--out", required=True)
    export.add_argument("store")
    export.set_defaults(func=_cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SessionlensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
