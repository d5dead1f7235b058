"""Turning an observed syndrome into a verdict about which modules failed.

The exact search branches on failing checks, vertex-cover style: the tester
of a failing check is either itself faulty, or fault-free — in which case
the testee is pinned faulty and, transitively, every outcome the tester
reported is taken at face value (unit propagation).  Branches die once more
than t modules are assumed faulty, so the search is exact for every t and
fast for the small budgets these graphs call for.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Mapping

from .errors import SizeCapError
from .graph import (
    DiagnosticGraph,
    NodeId,
    Syndrome,
    iter_subsets,
    pmc_compatible,
)

DEFAULT_CANDIDATE_LIMIT = 64
DEFAULT_ENUMERATION_CAP = 14


class VerdictKind(Enum):
    UNIQUE = "unique"
    AMBIGUOUS = "ambiguous"
    INCONSISTENT = "inconsistent"


class NodeStatus(Enum):
    KNOWN_FAULTY = "known_faulty"
    KNOWN_FAULT_FREE = "known_fault_free"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class DiagnosisVerdict:
    """What a syndrome says at fault budget t.

    ``candidates`` is sorted by cardinality then lexicographically and is
    truncated to the configured limit; ``candidate_count`` always carries
    the true total.  ``exceeds_majority_budget`` flags budgets above
    floor((n-1)/2), where unique identification can no longer be guaranteed
    for any graph (still useful for audits).
    """

    kind: VerdictKind
    budget: int
    fault_set: frozenset[NodeId] | None
    candidates: tuple[frozenset[NodeId], ...]
    candidate_count: int
    exceeds_majority_budget: bool

    def to_json_dict(self) -> dict:
        if self.kind is VerdictKind.UNIQUE:
            return {"kind": "unique", "fault_set": sorted(self.fault_set)}
        if self.kind is VerdictKind.AMBIGUOUS:
            return {
                "kind": "ambiguous",
                "count": self.candidate_count,
                "candidates": [sorted(c) for c in self.candidates],
            }
        return {"kind": "inconsistent"}


@dataclass(frozen=True)
class StatusReport:
    """Per-node knowability derived from the full candidate list."""

    statuses: Mapping[NodeId, NodeStatus]
    verdict: DiagnosisVerdict

    def to_json_dict(self) -> dict:
        return {str(nid): status.value for nid, status in sorted(self.statuses.items())}


def _candidate_masks(graph: DiagnosticGraph, syndrome: Syndrome, t: int) -> list[int]:
    """All fault sets of size <= t compatible with the syndrome, as bitmasks."""
    graph.require_valid()
    syndrome.require_total(graph)
    if not isinstance(t, int) or isinstance(t, bool) or t < 0:
        raise ValueError(f"t must be a non-negative integer, got {t!r}")
    n = graph.n
    full = (1 << n) - 1
    positions = graph.positions
    outcomes_by_tester: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for edge in graph.edges:
        outcomes_by_tester[positions[edge.tester]].append(
            (positions[edge.testee], syndrome.value(*edge.pair))
        )

    found: list[int] = []

    def propagate(
        in_mask: int, out_mask: int, queue: list[int]
    ) -> tuple[int, int] | None:
        while queue:
            tester = queue.pop()
            for testee, value in outcomes_by_tester[tester]:
                bit = 1 << testee
                if value:
                    if out_mask & bit:
                        return None
                    if not in_mask & bit:
                        in_mask |= bit
                        if in_mask.bit_count() > t:
                            return None
                else:
                    if in_mask & bit:
                        return None
                    if not out_mask & bit:
                        out_mask |= bit
                        queue.append(testee)
        return in_mask, out_mask

    def explore(in_mask: int, out_mask: int) -> None:
        undecided = full & ~(in_mask | out_mask)
        if not undecided:
            found.append(in_mask)
            return
        low = undecided & -undecided
        state = propagate(in_mask, out_mask | low, [low.bit_length() - 1])
        if state is not None:
            explore(*state)
        grown = in_mask | low
        if grown.bit_count() <= t:
            explore(grown, out_mask)

    explore(0, 0)
    found.sort(key=lambda mask: (mask.bit_count(), graph.id_tuple(mask)))
    return found


def _verdict_from_masks(
    graph: DiagnosticGraph, masks: list[int], t: int, candidate_limit: int
) -> DiagnosisVerdict:
    beyond = t > (graph.n - 1) // 2
    if not masks:
        return DiagnosisVerdict(
            VerdictKind.INCONSISTENT,
            budget=t,
            fault_set=None,
            candidates=(),
            candidate_count=0,
            exceeds_majority_budget=beyond,
        )
    if len(masks) == 1:
        only = graph.ids_of(masks[0])
        return DiagnosisVerdict(
            VerdictKind.UNIQUE,
            budget=t,
            fault_set=only,
            candidates=(only,),
            candidate_count=1,
            exceeds_majority_budget=beyond,
        )
    shown = tuple(graph.ids_of(mask) for mask in masks[:candidate_limit])
    return DiagnosisVerdict(
        VerdictKind.AMBIGUOUS,
        budget=t,
        fault_set=None,
        candidates=shown,
        candidate_count=len(masks),
        exceeds_majority_budget=beyond,
    )


def identify(
    graph: DiagnosticGraph,
    syndrome: Syndrome,
    t: int,
    *,
    candidate_limit: int = DEFAULT_CANDIDATE_LIMIT,
) -> DiagnosisVerdict:
    """Identify the faulty set from a syndrome, assuming at most t faults.

    Unique when exactly one compatible fault set of size <= t exists;
    Inconsistent when none does (which covers the case of more than t
    actual faults); Ambiguous otherwise, listing the candidates up to the
    configured limit.
    """
    masks = _candidate_masks(graph, syndrome, t)
    return _verdict_from_masks(graph, masks, t, candidate_limit)


def all_consistent_fault_sets(
    graph: DiagnosticGraph,
    syndrome: Syndrome,
    t: int,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[frozenset[NodeId]]:
    """Brute-force referee for :func:`identify`: try every subset directly.

    Returns all compatible fault sets of size <= t, sorted by size then
    lexicographically.  Exhaustive over all subsets, hence the node cap.
    """
    graph.require_valid()
    syndrome.require_total(graph)
    if not isinstance(t, int) or isinstance(t, bool) or t < 0:
        raise ValueError(f"t must be a non-negative integer, got {t!r}")
    if graph.n > cap:
        raise SizeCapError(
            f"exhaustive enumeration restricted to small graphs (n <= {cap}, "
            f"got {graph.n})"
        )
    result = []
    for combo in iter_subsets(graph.node_ids, t):
        candidate = frozenset(combo)
        if pmc_compatible(graph, syndrome, candidate):
            result.append(candidate)
    return result


def node_status(
    graph: DiagnosticGraph,
    syndrome: Syndrome,
    t: int,
    *,
    candidate_limit: int = DEFAULT_CANDIDATE_LIMIT,
) -> StatusReport:
    """Classify each node as known-faulty, known-fault-free, or unknown.

    A node is known-faulty when it belongs to every candidate fault set and
    known-fault-free when it belongs to none.  When the syndrome admits no
    candidate at all, every node is unknown and the verdict says so.
    """
    masks = _candidate_masks(graph, syndrome, t)
    verdict = _verdict_from_masks(graph, masks, t, candidate_limit)
    statuses: dict[NodeId, NodeStatus] = {}
    if not masks:
        for nid in graph.node_ids:
            statuses[nid] = NodeStatus.UNKNOWN
    else:
        everywhere = masks[0]
        anywhere = 0
        for mask in masks:
            everywhere &= mask
            anywhere |= mask
        for pos, nid in enumerate(graph.node_ids):
            bit = 1 << pos
            if everywhere & bit:
                statuses[nid] = NodeStatus.KNOWN_FAULTY
            elif not anywhere & bit:
                statuses[nid] = NodeStatus.KNOWN_FAULT_FREE
            else:
                statuses[nid] = NodeStatus.UNKNOWN
    return StatusReport(statuses=MappingProxyType(statuses), verdict=verdict)
