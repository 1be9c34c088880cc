"""Domain ontologies: triple loading, URL-to-resource rules, class closure.

Inference is deliberately small: rdf:type assertions plus the
reflexive-transitive closure of rdfs:subClassOf edges, which is exactly
what conjunctive class atoms over events need. Ontologies are immutable
after load and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .errors import CyclicHierarchy, MalformedTriple

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_SUBCLASS_OF = "http://www.w3.org/2000/01/rdf-schema#subClassOf"
XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"
XSD_DATETIME = "http://www.w3.org/2001/XMLSchema#dateTime"

WAM_NS = "http://greenlinkeddata.org/wam.owl#"


class WAM:
    """Fixed vocabulary used to describe sessions and events as triples."""

    EVENT = WAM_NS + "Event"
    SESSION = WAM_NS + "Session"
    USER = WAM_NS + "User"
    START_EVENT = WAM_NS + "StartEvent"
    END_EVENT = WAM_NS + "EndEvent"
    CONTENT_TYPE = WAM_NS + "ContentType"
    FUNCTION_TYPE = WAM_NS + "FunctionType"

    HAS_EVENT = WAM_NS + "hasEvent"
    FULL_URL = WAM_NS + "fullURL"
    BASE_URL = WAM_NS + "baseURL"
    TIME = WAM_NS + "time"
    ORDER = WAM_NS + "order"
    CONTENT_TYPE_PROP = WAM_NS + "contentType"
    FUNCTION_TYPE_PROP = WAM_NS + "functionType"
    USER_PROP = WAM_NS + "user"


_TEMPLATE_REF_RE = re.compile(r"\$(\d+)")


@dataclass(frozen=True)
class MappingRule:
    """Rewrites a URL into the IRI of the resource it presents.

    ``pattern`` is a regular expression searched against the full URL;
    ``template`` may reference its capture groups as $1..$9.
    """

    pattern: str
    template: str

    def __post_init__(self):
        compiled = re.compile(self.pattern)
        for ref in _TEMPLATE_REF_RE.findall(self.template):
            if int(ref) > compiled.groups:
                raise ValueError(
                    f"template references ${ref} but pattern has {compiled.groups} group(s)"
                )

    def apply(self, url: str) -> str | None:
        m = re.compile(self.pattern).search(url)
        if not m:
            return None
        return _TEMPLATE_REF_RE.sub(lambda ref: m.group(int(ref.group(1))), self.template)


@dataclass(frozen=True)
class Ontology:
    """Classes, subclass edges and instance typings for one web domain."""

    domain_base: str
    classes: frozenset[str]
    subclass_edges: frozenset[tuple[str, str]]
    type_assertions: frozenset[tuple[str, str]]
    url_rules: tuple[MappingRule, ...] = ()
    # class -> every superclass reachable from it, itself included
    ancestors: dict = field(default_factory=dict, compare=False, repr=False)


_TRIPLE_RE = re.compile(
    r"^<(?P<s>[^<>\"\s]+)>\s+<(?P<p>[^<>\"\s]+)>\s+"
    r"(?:<(?P<o_iri>[^<>\"\s]+)>|\"(?P<o_lit>(?:[^\"\\]|\\.)*)\"(?:\^\^<(?P<dt>[^<>\"\s]+)>)?)"
    r"\s*\.\s*$"
)


def parse_triple(line: str, line_number: int = 1) -> tuple[str, str, str, bool] | None:
    """Parse one ``<s> <p> <o> .`` line; objects may be IRIs or literals.

    Returns (subject, predicate, object, object_is_iri), or None for blank
    and comment lines.
    """
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _TRIPLE_RE.match(stripped)
    if not m:
        raise MalformedTriple(line_number, line.rstrip("\n"))
    if m.group("o_iri") is not None:
        return m.group("s"), m.group("p"), m.group("o_iri"), True
    literal = m.group("o_lit").replace('\\"', '"').replace("\\\\", "\\")
    return m.group("s"), m.group("p"), literal, False


def _closure_from_edges(
    classes: frozenset[str], edges: frozenset[tuple[str, str]]
) -> dict[str, frozenset[str]]:
    up: dict[str, set[str]] = {}
    for sub, sup in edges:
        up.setdefault(sub, set()).add(sup)

    # Kahn's algorithm over the edge set; leftovers mean a cycle
    indegree: dict[str, int] = {c: 0 for c in classes}
    for sub, sup in edges:
        indegree[sup] = indegree.get(sup, 0) + 1
        indegree.setdefault(sub, 0)
    queue = [c for c, d in indegree.items() if d == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for sup in up.get(node, ()):
            indegree[sup] -= 1
            if indegree[sup] == 0:
                queue.append(sup)
    if seen != len(indegree):
        stuck = sorted(c for c, d in indegree.items() if d > 0)
        raise CyclicHierarchy(stuck[0])

    ancestors: dict[str, frozenset[str]] = {}

    def walk(cls: str) -> frozenset[str]:
        cached = ancestors.get(cls)
        if cached is not None:
            return cached
        reach = {cls}
        for sup in up.get(cls, ()):
            reach |= walk(sup)
        result = frozenset(reach)
        ancestors[cls] = result
        return result

    for cls in indegree:
        walk(cls)
    return ancestors


def load_ontology(
    document: Iterable[str],
    domain_base: str,
    rules: Iterable[MappingRule] = (),
) -> Ontology:
    """Build an Ontology from line-delimited triples.

    Only rdf:type and rdfs:subClassOf are consumed; every other predicate
    is ignored so real RDF dumps load unchanged. Raises MalformedTriple on
    unparseable lines and CyclicHierarchy when the subclass edges loop.
    """
    classes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    assertions: set[tuple[str, str]] = set()
    for line_number, line in enumerate(document, start=1):
        parsed = parse_triple(line, line_number)
        if parsed is None:
            continue
        subject, predicate, obj, obj_is_iri = parsed
        if predicate == RDF_TYPE:
            if not obj_is_iri:
                raise MalformedTriple(line_number, line.rstrip("\n"))
            classes.add(obj)
            assertions.add((subject, obj))
        elif predicate == RDFS_SUBCLASS_OF:
            if not obj_is_iri:
                raise MalformedTriple(line_number, line.rstrip("\n"))
            classes.update((subject, obj))
            edges.add((subject, obj))

    frozen_classes = frozenset(classes)
    frozen_edges = frozenset(edges)
    ancestors = _closure_from_edges(frozen_classes, frozen_edges)
    return Ontology(
        domain_base=domain_base,
        classes=frozen_classes,
        subclass_edges=frozen_edges,
        type_assertions=frozenset(assertions),
        url_rules=tuple(rules),
        ancestors=ancestors,
    )


def resolve_resource(url: str, ontology: Ontology) -> str | None:
    """Map a URL on the ontology's domain to its resource IRI.

    Rules are tried in order; the first match wins. None when no rule
    matches.
    """
    for rule in ontology.url_rules:
        resource = rule.apply(url)
        if resource is not None:
            return resource
    return None


def class_membership(resource: str, ontology: Ontology) -> frozenset[str]:
    """Every class the resource belongs to, superclasses included."""
    result: set[str] = set()
    for subject, cls in ontology.type_assertions:
        if subject == resource:
            result |= ontology.ancestors.get(cls, frozenset({cls}))
    return frozenset(result)


def local_name(iri: str) -> str:
    """The fragment or last path segment of an IRI (its short name)."""
    return re.split(r"[#/]", iri)[-1]
