"""Engine configuration: one JSON file holding every knob the pipeline has.

Unknown keys are rejected and referenced files must exist at load time;
relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .enrich import FunctionRule
from .errors import ConfigError
from .logs import LOG_FORMATS, BotPolicy, DEFAULT_BOT_POLICY, decompose_url
from .ontology import MappingRule, Ontology, load_ontology
from .stats import DAY_COUNT_MODES


@dataclass(frozen=True)
class OntologySpec:
    domain_base: str
    triples_path: Path
    url_rules: tuple[MappingRule, ...]


@dataclass(frozen=True)
class EngineConfig:
    log_format: str = "combined"
    server_base_url: str | None = None
    idle_gap_seconds: int = 1800
    bot_policy: BotPolicy = DEFAULT_BOT_POLICY
    engine_domains: frozenset[str] = frozenset()
    ontologies: tuple[OntologySpec, ...] = ()
    function_rules: tuple[FunctionRule, ...] = ()
    day_count_mode: str = "calendar_days"


def _reject_unknown(obj: dict, allowed: set[str], context: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {context}: {', '.join(sorted(unknown))}")


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ConfigError(f"missing key {key!r} in {context}")
    return obj[key]


def _normalize_base(url: str, context: str) -> str:
    try:
        return decompose_url(url).base
    except Exception as exc:
        raise ConfigError(f"{context}: {url!r} is not an absolute URL") from exc


def _parse_bot_policy(obj: dict) -> BotPolicy:
    _reject_unknown(
        obj,
        {"agent_substrings", "max_requests_per_minute", "treat_missing_agent_as_bot"},
        "bot_policy",
    )
    substrings = obj.get("agent_substrings", list(DEFAULT_BOT_POLICY.agent_substrings))
    if not isinstance(substrings, list) or not all(isinstance(s, str) for s in substrings):
        raise ConfigError("bot_policy.agent_substrings must be a list of strings")
    return BotPolicy(
        agent_substrings=tuple(s.lower() for s in substrings),
        max_requests_per_minute=obj.get("max_requests_per_minute"),
        treat_missing_agent_as_bot=bool(obj.get("treat_missing_agent_as_bot", False)),
    )


def _parse_mapping_rule(obj: dict, context: str) -> MappingRule:
    _reject_unknown(obj, {"pattern", "template"}, context)
    try:
        return MappingRule(
            pattern=_require(obj, "pattern", context),
            template=_require(obj, "template", context),
        )
    except (ValueError, re.error) as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def _parse_ontology_spec(obj: dict, base_dir: Path, index: int) -> OntologySpec:
    context = f"ontologies[{index}]"
    _reject_unknown(obj, {"domain_base", "triples", "url_rules"}, context)
    domain = _normalize_base(_require(obj, "domain_base", context), context)
    triples = base_dir / _require(obj, "triples", context)
    if not triples.is_file():
        raise ConfigError(f"{context}: triples file {triples} does not exist")
    rules = tuple(
        _parse_mapping_rule(rule, f"{context}.url_rules[{i}]")
        for i, rule in enumerate(obj.get("url_rules", []))
    )
    return OntologySpec(domain_base=domain, triples_path=triples, url_rules=rules)


def _parse_function_rule(obj: dict, index: int) -> FunctionRule:
    context = f"function_rules[{index}]"
    _reject_unknown(
        obj, {"function_type", "path_pattern", "param_names", "base_urls"}, context
    )
    return FunctionRule(
        function_type=_require(obj, "function_type", context),
        path_pattern=obj.get("path_pattern"),
        param_names=frozenset(obj.get("param_names", [])),
        base_urls=frozenset(
            _normalize_base(b, context) for b in obj.get("base_urls", [])
        ),
    )


_TOP_LEVEL_KEYS = {
    "log_format",
    "server_base_url",
    "idle_gap_seconds",
    "bot_policy",
    "engine_domains",
    "ontologies",
    "function_rules",
    "day_count_mode",
}


def load_config(path) -> EngineConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    _reject_unknown(raw, _TOP_LEVEL_KEYS, "config")

    log_format = raw.get("log_format", "combined")
    if log_format not in LOG_FORMATS:
        raise ConfigError(f"log_format must be one of {LOG_FORMATS}")
    day_count_mode = raw.get("day_count_mode", "calendar_days")
    if day_count_mode not in DAY_COUNT_MODES:
        raise ConfigError(f"day_count_mode must be one of {DAY_COUNT_MODES}")
    gap = raw.get("idle_gap_seconds", 1800)
    if not isinstance(gap, int) or gap < 0:
        raise ConfigError("idle_gap_seconds must be a non-negative integer")

    base_dir = path.parent
    ontologies = tuple(
        _parse_ontology_spec(spec, base_dir, i)
        for i, spec in enumerate(raw.get("ontologies", []))
    )
    seen = set()
    for spec in ontologies:
        if spec.domain_base in seen:
            raise ConfigError(f"duplicate ontology for domain {spec.domain_base}")
        seen.add(spec.domain_base)

    server_base = raw.get("server_base_url")
    if server_base is not None:
        _normalize_base(server_base, "server_base_url")

    return EngineConfig(
        log_format=log_format,
        server_base_url=server_base,
        idle_gap_seconds=gap,
        bot_policy=_parse_bot_policy(raw.get("bot_policy", {})),
        engine_domains=frozenset(
            _normalize_base(d, "engine_domains") for d in raw.get("engine_domains", [])
        ),
        ontologies=ontologies,
        function_rules=tuple(
            _parse_function_rule(rule, i) for i, rule in enumerate(raw.get("function_rules", []))
        ),
        day_count_mode=day_count_mode,
    )


def load_registry(config: EngineConfig) -> dict[str, Ontology]:
    """Load every configured ontology, keyed by its domain base."""
    registry: dict[str, Ontology] = {}
    for spec in config.ontologies:
        with open(spec.triples_path, "r", encoding="utf-8") as handle:
            registry[spec.domain_base] = load_ontology(
                handle, spec.domain_base, spec.url_rules
            )
    return registry
