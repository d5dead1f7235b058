"""Diagnosability analysis, fault identification, and temporal diagnostic
graphs for modular pipelines."""

from .diagnosability import (
    Bounds,
    DiagnosabilityCertificate,
    MaxDiagnosability,
    OracleCounterexample,
    OracleResult,
    Verdict,
    common_syndrome,
    diagnosability_bounds,
    is_t_diagnosable,
    max_diagnosability,
    oracle_is_t_diagnosable,
    revalidate_certificate,
    search_ceiling,
)
from .errors import DiagkitError, GraphError, SizeCapError, SyndromeError
from .graph import (
    DiagnosticGraph,
    Edge,
    EdgeKind,
    FaultSet,
    Node,
    NodeId,
    Syndrome,
    as_fraction,
    is_consistent_fault_set,
    min_in_degree,
    pmc_compatible,
    testable_set,
    validate,
)
from .identification import (
    DiagnosisVerdict,
    NodeStatus,
    StatusReport,
    VerdictKind,
    all_consistent_fault_sets,
    identify,
    node_status,
)
from .simulator import (
    ALWAYS_FAIL,
    ALWAYS_PASS,
    FaultPolicy,
    MonteCarloReport,
    PolicyKind,
    Scenario,
    adversarial,
    bernoulli,
    generate_syndrome,
    monte_carlo,
    scenario,
    scenario_names,
)
from .temporal import (
    AuditReport,
    DiagnosabilityProfile,
    Interval,
    TemporalGraph,
    TemporalTemplate,
    audit,
    diagnosability_profile,
    expand,
    frequency_subgraph,
    restrict,
)

__version__ = "0.1.0"

__all__ = [
    "ALWAYS_FAIL",
    "ALWAYS_PASS",
    "AuditReport",
    "Bounds",
    "DiagkitError",
    "DiagnosabilityCertificate",
    "DiagnosabilityProfile",
    "DiagnosisVerdict",
    "DiagnosticGraph",
    "Edge",
    "EdgeKind",
    "FaultPolicy",
    "FaultSet",
    "GraphError",
    "Interval",
    "MaxDiagnosability",
    "MonteCarloReport",
    "Node",
    "NodeId",
    "NodeStatus",
    "OracleCounterexample",
    "OracleResult",
    "PolicyKind",
    "Scenario",
    "SizeCapError",
    "StatusReport",
    "Syndrome",
    "SyndromeError",
    "TemporalGraph",
    "TemporalTemplate",
    "Verdict",
    "VerdictKind",
    "adversarial",
    "all_consistent_fault_sets",
    "as_fraction",
    "audit",
    "bernoulli",
    "common_syndrome",
    "diagnosability_bounds",
    "diagnosability_profile",
    "expand",
    "frequency_subgraph",
    "generate_syndrome",
    "identify",
    "is_consistent_fault_set",
    "is_t_diagnosable",
    "max_diagnosability",
    "min_in_degree",
    "monte_carlo",
    "node_status",
    "oracle_is_t_diagnosable",
    "pmc_compatible",
    "restrict",
    "revalidate_certificate",
    "scenario",
    "scenario_names",
    "search_ceiling",
    "testable_set",
    "validate",
]
