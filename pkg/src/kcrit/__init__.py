"""kcrit: potential-based (k-1)-coloring with verifiable certificates.

Main entry points:

- ``color_or_witness(g, k)``: a proper (k-1)-coloring or a vertex set of
  k-potential at most k(k-3).
- ``procedure_R1(g, k)``: the flow classifier (outcomes S1-S5).
- ``chromatic_number`` / ``is_k_critical``: exact desk-scale oracles.
- ``F`` / ``gallai_exact`` / ``hajos_join`` / ``iterate_ore_chain``:
  sharp edge bounds and the constructions achieving them.
"""

from .graphs import (
    Cluster,
    Graph,
    GraphError,
    ParseError,
    cluster_of,
    clusters,
    parse_dimacs,
    parse_graph6,
    to_graph6,
)
from .flow import CutResult, FlowError, FlowNetwork, max_flow
from .potential import (
    OracleSizeError,
    PotentialError,
    PotentialWitness,
    R1Outcome,
    brute_classify,
    brute_min_potential,
    build_R1_network,
    oracle_limit,
    procedure_R1,
    rho,
    scaled_h_flow_identity,
)
from .kernels import (
    Digraph,
    HallViolation,
    KernelError,
    find_kernel,
    list_color_via_kernels,
    orient_AB,
    split_and_match,
)
from .oracle import (
    BoundReport,
    F,
    bound_report,
    chromatic_number,
    dirac_lb,
    gallai_exact,
    hajos_join,
    is_colorable,
    is_k_critical,
    iterate_ore_chain,
    ks_lb,
    ore_upper,
    ore_upper_step,
)
from .reducer import (
    ColorAssignment,
    InternalConsistencyError,
    NoRuleApplies,
    Reduction,
    ReductionTrace,
    ReducerError,
    WeightedSet,
    boundary_classes,
    choose_i,
    clique_cluster_rules,
    color_or_witness,
    lemma4_edges,
    small_k_extras,
    step7_peel_and_color,
    y_gadget,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "Cluster",
    "ColorAssignment",
    "CutResult",
    "Digraph",
    "F",
    "FlowError",
    "FlowNetwork",
    "Graph",
    "GraphError",
    "HallViolation",
    "InternalConsistencyError",
    "KernelError",
    "NoRuleApplies",
    "OracleSizeError",
    "ParseError",
    "PotentialError",
    "PotentialWitness",
    "R1Outcome",
    "Reduction",
    "ReducerError",
    "ReductionTrace",
    "WeightedSet",
    "bound_report",
    "boundary_classes",
    "brute_classify",
    "brute_min_potential",
    "build_R1_network",
    "choose_i",
    "chromatic_number",
    "clique_cluster_rules",
    "cluster_of",
    "clusters",
    "color_or_witness",
    "dirac_lb",
    "find_kernel",
    "gallai_exact",
    "hajos_join",
    "is_colorable",
    "is_k_critical",
    "iterate_ore_chain",
    "ks_lb",
    "lemma4_edges",
    "list_color_via_kernels",
    "max_flow",
    "oracle_limit",
    "ore_upper",
    "ore_upper_step",
    "orient_AB",
    "parse_dimacs",
    "parse_graph6",
    "procedure_R1",
    "rho",
    "scaled_h_flow_identity",
    "small_k_extras",
    "split_and_match",
    "step7_peel_and_color",
    "to_graph6",
    "y_gadget",
]
