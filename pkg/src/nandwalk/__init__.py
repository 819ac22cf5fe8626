"""nandwalk: NAND formula evaluation via a simulated coined quantum walk.

The pipeline: parse or generate a NAND formula, attach a two-vertex tail
below its gate tree, weight the edges by subformula sizes, quantize the
resulting matrix into a coined walk on directed edges, and run phase
estimation from the tail edge.  The outcome distribution's mass on
{0, T/2} decides the formula value.  Spectral verifiers check the facts
this relies on numerically, and classical evaluators provide the ground
truth and the query-count baseline.
"""

from nandwalk.formula import (
    FormulaStats,
    Gate,
    Leaf,
    compute_stats,
    evaluate_classical,
    expand_fanin,
    generate,
    parse_formula,
    rebalance,
    to_nand,
)
from nandwalk.hamiltonian import (
    GateTree,
    WeightedAdjacency,
    apply_input,
    build_tree_with_tail,
    edge_weights,
    norm_upper_bound,
)
from nandwalk.szegedy import (
    CoinedWalk,
    apply_oracle,
    build_walk,
    classical_transition,
    principal_eigenvector,
    verify_correspondence,
    walk_from_hamiltonian,
)
from nandwalk.walksim import (
    PhaseEstimationConfig,
    RunResult,
    count_queries,
    default_config,
    evaluate,
    prepare,
    run_phase_estimation,
)

__version__ = "0.1.0"

__all__ = [
    "FormulaStats", "Gate", "Leaf", "compute_stats", "evaluate_classical",
    "expand_fanin", "generate", "parse_formula", "rebalance", "to_nand",
    "GateTree", "WeightedAdjacency", "apply_input", "build_tree_with_tail",
    "edge_weights", "norm_upper_bound",
    "CoinedWalk", "apply_oracle", "build_walk", "classical_transition",
    "principal_eigenvector", "verify_correspondence", "walk_from_hamiltonian",
    "PhaseEstimationConfig", "RunResult", "count_queries", "default_config",
    "evaluate", "prepare", "run_phase_estimation",
    "__version__",
]
