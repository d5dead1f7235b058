"""JSON round trips, format validation, and DOT rendering."""

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cycle_syndrome, random_digraph
from diagkit.dot import graph_to_dot, temporal_to_dot
from diagkit.errors import SyndromeError
from diagkit.graph import DiagnosticGraph, Edge, EdgeKind, Node, Syndrome
from diagkit.jsonio import (
    dump_json,
    fraction_from_json,
    fraction_to_json,
    graph_from_dict,
    graph_to_dict,
    load_graph_file,
    syndrome_from_dict,
    syndrome_to_dict,
    temporal_from_dict,
    temporal_to_dict,
)
from diagkit.simulator import ALWAYS_PASS, generate_syndrome
from diagkit.temporal import Interval, TemporalGraph, TemporalTemplate, expand, restrict


@st.composite
def arbitrary_graphs(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    ids = list(range(1, n + 1))
    frequencies = st.one_of(
        st.none(),
        st.sampled_from([1, 5, 100, Fraction(1, 3), 0.02, Fraction(7, 2)]),
    )
    nodes = [
        Node(
            i,
            label=draw(st.sampled_from(["", "io", 'quo"ted', "reader"])),
            frequency_hz=draw(frequencies),
        )
        for i in ids
    ]
    pairs = [(i, j) for i in ids for j in ids if i != j]
    chosen = sorted(draw(st.sets(st.sampled_from(pairs)))) if pairs else []
    edges = [Edge(a, b, draw(st.sampled_from(list(EdgeKind)))) for a, b in chosen]
    return DiagnosticGraph.build(nodes, edges)


class TestGraphRoundTrip:
    @given(arbitrary_graphs())
    @settings(max_examples=150, deadline=None)
    def test_round_trip_preserves_structure(self, graph):
        data = json.loads(json.dumps(graph_to_dict(graph)))
        assert graph_from_dict(data) == graph

    def test_documented_shape(self, localization):
        doc = graph_to_dict(localization)
        assert {"id": 1, "label": "GPS reader", "hz": 1.0} in doc["nodes"]
        assert {"tester": 6, "testee": 1, "kind": "input_admissibility"} in doc[
            "edges"
        ]

    def test_unknown_kind_warns_and_maps_to_unspecified(self):
        data = {
            "nodes": [{"id": 1}, {"id": 2}],
            "edges": [{"tester": 1, "testee": 2, "kind": "vibes"}],
        }
        with pytest.warns(UserWarning, match="unknown edge kind"):
            graph = graph_from_dict(data)
        assert graph.edges[0].kind is EdgeKind.UNSPECIFIED

    def test_missing_kind_defaults_to_unspecified(self):
        data = {"nodes": [{"id": 1}, {"id": 2}], "edges": [{"tester": 1, "testee": 2}]}
        assert graph_from_dict(data).edges[0].kind is EdgeKind.UNSPECIFIED

    def test_malformed_document(self):
        with pytest.raises(ValueError, match="nodes"):
            graph_from_dict({"edges": []})


class TestFractionJson:
    def test_decimal_representable_stays_numeric(self):
        assert fraction_to_json(Fraction(1, 50)) == 0.02
        assert fraction_to_json(Fraction(100)) == 100.0

    def test_non_decimal_becomes_ratio_string(self):
        assert fraction_to_json(Fraction(1, 3)) == "1/3"
        assert fraction_from_json("1/3") == Fraction(1, 3)

    def test_round_trip(self):
        for value in (Fraction(1, 3), Fraction(1, 50), Fraction(7, 2), Fraction(5)):
            assert fraction_from_json(fraction_to_json(value)) == value


class TestSyndromeJson:
    def test_round_trip(self, five_cycle):
        syndrome = cycle_syndrome(0, 1, 0, 0, 1)
        data = json.loads(json.dumps(syndrome_to_dict(syndrome)))
        assert syndrome_from_dict(data, five_cycle) == syndrome

    def test_documented_shape(self):
        doc = syndrome_to_dict(Syndrome({(5, 1): 1}))
        assert doc == {"outcomes": [{"tester": 5, "testee": 1, "value": 1}]}

    def test_duplicate_outcome_rejected(self, five_cycle):
        data = {
            "outcomes": [
                {"tester": 1, "testee": 2, "value": 0},
                {"tester": 1, "testee": 2, "value": 1},
            ]
        }
        with pytest.raises(SyndromeError, match="duplicate"):
            syndrome_from_dict(data, five_cycle)

    def test_partial_coverage_rejected(self, five_cycle):
        data = {"outcomes": [{"tester": 1, "testee": 2, "value": 0}]}
        with pytest.raises(SyndromeError, match="missing"):
            syndrome_from_dict(data, five_cycle)


class TestTemporalJson:
    def test_round_trip(self, pane_100hz):
        template = TemporalTemplate(offsets=frozenset({1, 2}), bidirectional=True)
        g = expand(pane_100hz, 100, Interval(0, 0.02), template)
        data = json.loads(json.dumps(temporal_to_dict(g)))
        assert temporal_from_dict(data) == g

    def test_round_trip_of_restriction(self, pane_100hz):
        g = expand(pane_100hz, 100, Interval(0, 0.02))
        sub = restrict(g, Interval(0, 0.01))
        assert temporal_from_dict(temporal_to_dict(sub)) == sub

    def test_random_round_trips(self):
        rng = random.Random(89)
        for _ in range(40):
            base = random_digraph(rng, rng.randint(1, 5), rng.random())
            hz = rng.choice([1, 10, Fraction(1, 3)])
            m = rng.randint(0, 3)
            template = TemporalTemplate(
                offsets=frozenset(rng.sample([1, 2, 3], rng.randint(1, 2))),
                bidirectional=rng.random() < 0.5,
                base_identity_only=rng.random() < 0.8,
            )
            g = expand(base, hz, Interval(0, Fraction(m, 1) / hz), template)
            assert temporal_from_dict(temporal_to_dict(g)) == g


class TestFiles:
    def test_load_graph_file_detects_kind(self, tmp_path, pane_100hz):
        plain = tmp_path / "plain.json"
        plain.write_text(dump_json(graph_to_dict(pane_100hz)))
        loaded = load_graph_file(plain)
        assert isinstance(loaded, DiagnosticGraph)
        temporal = tmp_path / "temporal.json"
        g = expand(pane_100hz, 100, Interval(0, 0.01))
        temporal.write_text(dump_json(temporal_to_dict(g)))
        loaded = load_graph_file(temporal)
        assert isinstance(loaded, TemporalGraph)
        assert loaded == g

    def test_dump_json_is_stable(self, five_cycle):
        doc = graph_to_dict(five_cycle)
        assert dump_json(doc) == dump_json(json.loads(json.dumps(doc)))


class TestDot:
    def test_nodes_and_kind_labels(self, localization):
        rendered = graph_to_dot(localization)
        assert '"1" [label="1:GPS reader"];' in rendered
        assert '"6" -> "1" [label="input_admissibility"];' in rendered

    def test_syndrome_highlights_failures(self, five_cycle):
        rendered = graph_to_dot(five_cycle, cycle_syndrome(0, 0, 0, 0, 1))
        assert '"5" -> "1" [color="crimson", penwidth=2.0];' in rendered
        assert '"1" -> "2";' in rendered

    def test_label_escaping(self):
        g = DiagnosticGraph.build([Node(1, label='say "hi"')], [])
        assert '\\"hi\\"' in graph_to_dot(g)

    def test_temporal_vertex_names(self, pane_100hz):
        g = expand(pane_100hz, 100, Interval(0, 0.01))
        rendered = temporal_to_dot(g)
        assert '"0:4";' in rendered
        assert '"0:4" -> "1:4" [label="temporal"];' in rendered

    def test_temporal_with_syndrome(self, pane_100hz):
        g = expand(pane_100hz, 100, Interval(0, 0.01))
        faulty = frozenset({g.flat_id((0, 9))})
        syndrome = generate_syndrome(g.flat_graph, faulty, ALWAYS_PASS)
        rendered = temporal_to_dot(g, syndrome)
        assert "crimson" in rendered
