"""Core graph model: validation, degrees, testable sets, consistency."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CYCLE_PAIRS, cycle_syndrome, random_digraph
from diagkit.errors import GraphError, SyndromeError
from diagkit.graph import (
    DiagnosticGraph,
    Edge,
    EdgeKind,
    Node,
    Syndrome,
    is_consistent_fault_set,
    iter_subsets,
    min_in_degree,
    pmc_compatible,
    testable_set,
    validate,
)


def complete_digraph(n: int) -> DiagnosticGraph:
    nodes = [Node(i) for i in range(1, n + 1)]
    edges = [
        Edge(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j
    ]
    return DiagnosticGraph.build(nodes, edges)


class TestValidate:
    def test_five_cycle_is_clean(self, five_cycle):
        assert validate(five_cycle) == []

    def test_self_loop(self):
        g = DiagnosticGraph((Node(1), Node(2)), (Edge(1, 1),))
        report = validate(g)
        assert any("self-loop" in item for item in report)

    def test_dangling_endpoint(self):
        nodes = tuple(Node(i) for i in range(1, 6))
        g = DiagnosticGraph(nodes, (Edge(1, 9),))
        report = validate(g)
        assert any("dangling endpoint" in item and "9" in item for item in report)

    def test_duplicate_edge(self):
        g = DiagnosticGraph((Node(1), Node(2)), (Edge(1, 2), Edge(1, 2)))
        assert any("duplicate edge" in item for item in validate(g))

    def test_duplicate_node_id(self):
        g = DiagnosticGraph((Node(1), Node(1, label="again")), ())
        assert any("duplicate node id" in item for item in validate(g))

    def test_build_raises_on_violations(self):
        with pytest.raises(GraphError, match="self-loop"):
            DiagnosticGraph.build([Node(1)], [Edge(1, 1)])

    def test_operations_reject_invalid_graphs(self):
        g = DiagnosticGraph((Node(1), Node(2)), (Edge(1, 1),))
        with pytest.raises(GraphError):
            min_in_degree(g)


class TestNodeAndEdgeInvariants:
    def test_negative_id_rejected(self):
        with pytest.raises(ValueError):
            Node(-1)

    def test_non_positive_frequency_rejected(self):
        with pytest.raises(ValueError):
            Node(1, frequency_hz=0)

    def test_frequency_normalized_to_fraction(self):
        from fractions import Fraction

        assert Node(1, frequency_hz=0.02).frequency_hz == Fraction(1, 50)


class TestMinInDegree:
    def test_five_cycle(self, five_cycle):
        assert min_in_degree(five_cycle) == (1, frozenset({1, 2, 3, 4, 5}))

    def test_localization(self, localization):
        value, attaining = min_in_degree(localization)
        assert value == 2
        assert 6 in attaining

    def test_complete_digraph(self):
        assert min_in_degree(complete_digraph(3)) == (2, frozenset({1, 2, 3}))

    def test_empty_graph(self):
        with pytest.raises(GraphError, match="empty graph"):
            min_in_degree(DiagnosticGraph((), ()))


class TestTestableSet:
    def test_localization_pinned_subset(self, localization):
        assert testable_set(localization, {1, 2, 3, 4, 5, 8, 9, 10}) == frozenset({11})

    def test_all_nodes_yields_empty(self, five_cycle):
        assert testable_set(five_cycle, {1, 2, 3, 4, 5}) == frozenset()

    def test_five_cycle_singleton(self, five_cycle):
        assert testable_set(five_cycle, {1}) == frozenset({2})

    def test_unknown_ids_rejected(self, five_cycle):
        with pytest.raises(ValueError, match="unknown node ids"):
            testable_set(five_cycle, {1, 42})

    def test_disjoint_from_input(self, five_cycle):
        rng = random.Random(5)
        for _ in range(50):
            g = random_digraph(rng, rng.randint(1, 7), rng.random())
            members = {i for i in g.node_ids if rng.random() < 0.5}
            assert not testable_set(g, members) & members


class TestConsistentFaultSet:
    def test_single_fault_example(self, five_cycle):
        report = is_consistent_fault_set(five_cycle, cycle_syndrome(0, 0, 0, 0, 1), {1}, 1)
        assert report.consistent

    def test_uncovered_failure(self, five_cycle):
        report = is_consistent_fault_set(
            five_cycle, cycle_syndrome(0, 0, 0, 0, 1), set(), 1
        )
        assert not report.consistent
        assert report.failed_condition == "cond_ii"
        assert report.witness_edge == (5, 1)

    def test_two_fault_example_matches_brute_force(self, five_cycle):
        syndrome = cycle_syndrome(0, 1, 0, 0, 1)
        members = frozenset({1, 3})
        # brute-force re-check of the three conditions
        failing = [pair for pair in CYCLE_PAIRS if syndrome.value(*pair) == 1]
        assert len(members) <= 2
        assert all(a in members or b in members for a, b in failing)
        assert all(
            syndrome.value(a, b) == 0
            for a, b in CYCLE_PAIRS
            if a not in members and b not in members
        )
        assert is_consistent_fault_set(five_cycle, syndrome, members, 2).consistent

    def test_budget_violation(self, five_cycle):
        report = is_consistent_fault_set(
            five_cycle, cycle_syndrome(0, 0, 0, 0, 0), {1, 2}, 1
        )
        assert not report.consistent
        assert report.failed_condition == "cond_i"

    def test_partial_syndrome_rejected(self, five_cycle):
        partial = Syndrome({(1, 2): 0})
        with pytest.raises(SyndromeError, match="every edge exactly once"):
            is_consistent_fault_set(five_cycle, partial, set(), 1)


class TestPmcCompatible:
    def test_single_fault(self, five_cycle):
        assert pmc_compatible(five_cycle, cycle_syndrome(0, 0, 0, 0, 1), {1})

    def test_forced_outcome_contradiction(self, five_cycle):
        # a fault-free tester of node 2 would have reported the failure
        assert not pmc_compatible(five_cycle, cycle_syndrome(0, 0, 0, 0, 1), {2})

    def test_two_faults_with_free_outcomes(self, five_cycle):
        assert pmc_compatible(five_cycle, cycle_syndrome(0, 1, 0, 0, 1), {1, 2})


@st.composite
def graph_syndrome_faults(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    ids = list(range(1, n + 1))
    pairs = [(i, j) for i in ids for j in ids if i != j]
    chosen = sorted(draw(st.sets(st.sampled_from(pairs)))) if pairs else []
    graph = DiagnosticGraph(
        tuple(Node(i) for i in ids), tuple(Edge(*pair) for pair in chosen)
    )
    syndrome = Syndrome(
        {pair: draw(st.integers(min_value=0, max_value=1)) for pair in chosen}
    )
    faults = frozenset(draw(st.sets(st.sampled_from(ids))))
    return graph, syndrome, faults


class TestModelProperties:
    @given(graph_syndrome_faults())
    @settings(max_examples=200, deadline=None)
    def test_strict_compatibility_implies_consistency(self, case):
        graph, syndrome, faults = case
        if pmc_compatible(graph, syndrome, faults):
            assert is_consistent_fault_set(graph, syndrome, faults, len(faults))

    @given(graph_syndrome_faults())
    @settings(max_examples=200, deadline=None)
    def test_empty_fault_set_iff_all_pass(self, case):
        graph, syndrome, _ = case
        all_pass = all(value == 0 for value in syndrome.outcomes.values())
        assert pmc_compatible(graph, syndrome, frozenset()) == all_pass


class TestSyndrome:
    def test_values_restricted_to_bits(self):
        with pytest.raises(SyndromeError, match="0 or 1"):
            Syndrome({(1, 2): 2})

    def test_missing_edge_lookup(self):
        with pytest.raises(SyndromeError, match="no outcome recorded"):
            Syndrome({}).value(1, 2)

    def test_all_clear(self, five_cycle):
        syndrome = Syndrome.all_clear(five_cycle)
        syndrome.require_total(five_cycle)
        assert set(syndrome.outcomes.values()) == {0}

    def test_extra_edges_rejected(self, five_cycle):
        syndrome = Syndrome({**Syndrome.all_clear(five_cycle).outcomes, (1, 3): 0})
        with pytest.raises(SyndromeError, match="unknown edges"):
            syndrome.require_total(five_cycle)


def test_iter_subsets_order():
    got = list(iter_subsets([3, 1, 2], 2))
    assert got == [(), (1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]


def test_graph_equality_is_structural():
    a = DiagnosticGraph((Node(2), Node(1)), (Edge(1, 2, EdgeKind.TEMPORAL),))
    b = DiagnosticGraph((Node(1), Node(2)), (Edge(1, 2, EdgeKind.TEMPORAL),))
    assert a == b
