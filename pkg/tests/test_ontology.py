"""Triple loading, URL-to-resource rules and subclass closure."""

from __future__ import annotations

import pytest

from sessionlens.errors import CyclicHierarchy, MalformedTriple
from sessionlens.ontology import (
    MappingRule,
    class_membership,
    load_ontology,
    local_name,
    parse_triple,
    resolve_resource,
)

import properties

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
SUBCLASS = "http://www.w3.org/2000/01/rdf-schema#subClassOf"
SWRC = "http://swrc.ontoware.org/ontology#"


def triple(s, p, o):
    return f"<{s}> <{p}> <{o}> ."


class TestLoadOntology:
    def test_type_and_subclass(self):
        lines = [
            triple("http://x.org/p1", RDF_TYPE, SWRC + "InProceedings"),
            triple(SWRC + "InProceedings", SUBCLASS, SWRC + "Publication"),
        ]
        ont = load_ontology(lines, "http://x.org")
        assert ont.classes == {SWRC + "InProceedings", SWRC + "Publication"}
        assert ont.subclass_edges == {(SWRC + "InProceedings", SWRC + "Publication")}
        assert ont.type_assertions == {("http://x.org/p1", SWRC + "InProceedings")}

    def test_empty_document(self):
        ont = load_ontology([], "http://x.org")
        assert ont.classes == frozenset()
        assert ont.subclass_edges == frozenset()
        assert ont.type_assertions == frozenset()

    def test_cycle_detected(self):
        lines = [
            triple("http://x.org/A", SUBCLASS, "http://x.org/B"),
            triple("http://x.org/B", SUBCLASS, "http://x.org/A"),
        ]
        with pytest.raises(CyclicHierarchy):
            load_ontology(lines, "http://x.org")

    def test_self_edge_is_a_cycle(self):
        with pytest.raises(CyclicHierarchy):
            load_ontology([triple("http://x.org/A", SUBCLASS, "http://x.org/A")], "http://x.org")

    def test_unknown_predicates_ignored(self):
        lines = [
            triple("http://x.org/p1", "http://x.org/author", "http://x.org/alice"),
            '<http://x.org/p1> <http://x.org/title> "Some \\"Title\\"" .',
            f'<http://x.org/e1> <http://x.org/order> "1"^^<http://www.w3.org/2001/XMLSchema#integer> .',
        ]
        ont = load_ontology(lines, "http://x.org")
        assert ont.classes == frozenset()

    def test_blank_and_comment_lines_skipped(self):
        ont = load_ontology(["", "  ", "# comment"], "http://x.org")
        assert ont.classes == frozenset()

    def test_malformed_line(self):
        with pytest.raises(MalformedTriple) as err:
            load_ontology(["<a> <b> <c>"], "http://x.org")  # missing final dot
        assert err.value.line_number == 1

    def test_literal_object_on_type_rejected(self):
        with pytest.raises(MalformedTriple):
            load_ontology([f'<http://x.org/p> <{RDF_TYPE}> "City" .'], "http://x.org")

    def test_insensitive_to_triple_order(self):
        lines = [
            triple("http://x.org/p1", RDF_TYPE, "http://x.org/A"),
            triple("http://x.org/A", SUBCLASS, "http://x.org/B"),
            triple("http://x.org/p2", RDF_TYPE, "http://x.org/B"),
        ]
        assert load_ontology(lines, "http://x.org") == load_ontology(
            list(reversed(lines)), "http://x.org"
        )


def test_parse_triple_literal_forms():
    assert parse_triple('<a:s> <a:p> "v" .') == ("a:s", "a:p", "v", False)
    assert parse_triple('<a:s> <a:p> "1"^^<x:int> .') == ("a:s", "a:p", "1", False)
    assert parse_triple("<a:s> <a:p> <a:o> .") == ("a:s", "a:p", "a:o", True)
    assert parse_triple("   ") is None


class TestResolveResource:
    RULE = MappingRule("^http://dbpedia\\.org/page/(.*)$", "http://dbpedia.org/resource/$1")

    def _ontology(self, rules):
        return load_ontology([], "http://dbpedia.org", rules)

    def test_rewrite(self):
        ont = self._ontology([self.RULE])
        assert (
            resolve_resource("http://dbpedia.org/page/Lyon", ont)
            == "http://dbpedia.org/resource/Lyon"
        )

    def test_no_match(self):
        ont = self._ontology([self.RULE])
        assert resolve_resource("http://dbpedia.org/sparql", ont) is None

    def test_first_rule_wins(self):
        first = MappingRule("^http://x.org/(.*)$", "http://x.org/one/$1")
        second = MappingRule("^http://x.org/(.*)$", "http://x.org/two/$1")
        ont = load_ontology([], "http://x.org", [first, second])
        assert resolve_resource("http://x.org/abc", ont) == "http://x.org/one/abc"

    def test_template_validation(self):
        with pytest.raises(ValueError):
            MappingRule("no-groups", "$1")


class TestClassMembership:
    def test_superclass_included(self):
        lines = [
            triple("http://x.org/p1", RDF_TYPE, SWRC + "InProceedings"),
            triple(SWRC + "InProceedings", SUBCLASS, SWRC + "Publication"),
        ]
        ont = load_ontology(lines, "http://x.org")
        assert class_membership("http://x.org/p1", ont) == {
            SWRC + "InProceedings",
            SWRC + "Publication",
        }

    def test_untyped_resource(self):
        ont = load_ontology([], "http://x.org")
        assert class_membership("http://x.org/ghost", ont) == frozenset()

    def test_four_level_chain(self):
        chain = ["http://x.org/A", "http://x.org/B", "http://x.org/C", "http://x.org/D"]
        lines = [triple(a, SUBCLASS, b) for a, b in zip(chain, chain[1:])]
        lines.append(triple("http://x.org/r", RDF_TYPE, chain[0]))
        ont = load_ontology(lines, "http://x.org")

        # reachability oracle over the raw edge set
        reached = {chain[0]}
        frontier = [chain[0]]
        while frontier:
            node = frontier.pop()
            for sub, sup in ont.subclass_edges:
                if sub == node and sup not in reached:
                    reached.add(sup)
                    frontier.append(sup)
        assert class_membership("http://x.org/r", ont) == reached == set(chain)

    def test_closure_suite_matches_fixpoint_oracle(self):
        assert properties.run_closure_closed(cases=150) == 150


def test_local_name():
    assert local_name("http://x.org/onto#City") == "City"
    assert local_name("http://x.org/onto/City") == "City"
    assert local_name("City") == "City"
