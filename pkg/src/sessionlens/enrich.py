"""Assign content and function types to browsing events.

Content types come from the domain ontology registered for the event's
base URL; function types from a configurable rule table followed by a
fixed default chain. Enrichment is a pure per-event transformation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .logs import UrlParts, decompose_url
from .ontology import WAM_NS, Ontology, class_membership, resolve_resource
from .sessions import BrowsingEvent, Session, make_session

ENGINE_SEARCH = WAM_NS + "EngineSearch"
SITE_SEARCH = WAM_NS + "SiteSearch"
HOMEPAGE = WAM_NS + "Homepage"
SPARQL_QUERY = WAM_NS + "SparqlQuery"
INFORMATIVE = WAM_NS + "Informative"


@dataclass(frozen=True)
class FunctionRule:
    """User-supplied classifier: all stated conditions must hold.

    ``path_pattern`` is a regex searched against the URL path,
    ``param_names`` must all be present among the query parameter names,
    and when ``base_urls`` is non-empty the event base must be one of them.
    """

    function_type: str
    path_pattern: str | None = None
    param_names: frozenset[str] = frozenset()
    base_urls: frozenset[str] = frozenset()

    def matches(self, parts: UrlParts) -> bool:
        if self.base_urls and parts.base not in self.base_urls:
            return False
        if self.path_pattern is not None and not re.search(self.path_pattern, parts.path):
            return False
        names = {p.name for p in parts.params}
        return self.param_names <= names


def classify_function(
    parts: UrlParts,
    engine_domains: frozenset[str] | set[str],
    rules: Iterable[FunctionRule] = (),
) -> frozenset[str]:
    """Function types for a URL: matching rules plus one default type.

    The default chain fires exactly once, in order: engine search, homepage,
    SPARQL endpoint, in-site search, informative catch-all — so every event
    ends up with at least one function type.
    """
    types = {rule.function_type for rule in rules if rule.matches(parts)}
    names = [p.name for p in parts.params]
    path = parts.path.lower()
    if parts.base in engine_domains and ("q" in names or "search" in path):
        types.add(ENGINE_SEARCH)
    elif path in ("", "/"):
        types.add(HOMEPAGE)
    elif "sparql" in path:
        types.add(SPARQL_QUERY)
    elif names and any("search" in name.lower() for name in names):
        types.add(SITE_SEARCH)
    else:
        types.add(INFORMATIVE)
    return frozenset(types)


def enrich_event(
    event: BrowsingEvent,
    registry: Mapping[str, Ontology],
    engine_domains: frozenset[str] | set[str],
    rules: Iterable[FunctionRule] = (),
) -> BrowsingEvent:
    """Fill in content and function types; all other fields are untouched.

    Events on domains without a registered ontology, and URLs no mapping
    rule resolves, get empty content types rather than an error.
    """
    parts = decompose_url(event.full_url)
    content: frozenset[str] = frozenset()
    ontology = registry.get(event.base_url)
    if ontology is not None:
        resource = resolve_resource(event.full_url, ontology)
        if resource is not None:
            content = class_membership(resource, ontology)
    return replace(
        event,
        content_types=content,
        function_types=classify_function(parts, engine_domains, rules),
    )


def enrich_session(
    session: Session,
    registry: Mapping[str, Ontology],
    engine_domains: frozenset[str] | set[str],
    rules: Iterable[FunctionRule] = (),
) -> Session:
    events = [enrich_event(ev, registry, engine_domains, rules) for ev in session.events]
    return make_session(session.user, events)


def enrich_sessions(
    sessions: Iterable[Session],
    registry: Mapping[str, Ontology],
    engine_domains: frozenset[str] | set[str],
    rules: Iterable[FunctionRule] = (),
) -> list[Session]:
    return [enrich_session(s, registry, engine_domains, rules) for s in sessions]
