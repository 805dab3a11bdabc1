"""Weight-private hierarchical clustering under Dasgupta's objective."""

from .algorithms import (
    HcAlgorithmConfig,
    blended_hc,
    exponential_mechanism_hc,
    hc_dp,
    input_perturbation_hc,
    linkage_hc,
    nonprivate_hc,
    top_cut_side,
)
from .cuts import (
    CutResult,
    balance_floor,
    balanced_sparsest_cut,
    brute_force_balanced_min_cut,
    brute_force_balanced_sparsest_cut,
    brute_force_sparsest_cut,
    canonical_cut,
    sparsity,
)
from .generators import (
    HardInstance,
    gen_hard_instance,
    gen_hsbm,
    gen_random_5cycles,
    gen_sbm,
    kernel_graph,
    load_features,
    peel_tree,
)
from .graph import WeightedGraph, new_graph, read_graph, write_graph
from .hctree import (
    HcTree,
    brute_force_optimal_tree,
    cost_by_splits,
    cost_sensitivity_check,
    dasgupta_cost,
    enumerate_all_trees,
    make_tree,
    parse_tree,
    serialize_tree,
    tree_count,
)
from .mechanisms import (
    EpsilonLedger,
    SeededRng,
    child_seed,
    compose_basic,
    compose_strong,
    perturb_graph,
    perturb_graph_plain,
    private_cost_release,
    private_scalar,
    private_select_best,
    raw_perturbed_weights,
    sample_laplace,
)
from .reduction import (
    adaptive_reduction_hc,
    balanced_sparsest_to_min_cut_check,
    dp_cut_subroutine,
    epsilon_for_subgraph,
)

__version__ = "0.1.0"

__all__ = [
    "CutResult",
    "EpsilonLedger",
    "HardInstance",
    "HcAlgorithmConfig",
    "HcTree",
    "SeededRng",
    "WeightedGraph",
    "adaptive_reduction_hc",
    "balance_floor",
    "balanced_sparsest_cut",
    "balanced_sparsest_to_min_cut_check",
    "blended_hc",
    "brute_force_balanced_min_cut",
    "brute_force_balanced_sparsest_cut",
    "brute_force_optimal_tree",
    "brute_force_sparsest_cut",
    "canonical_cut",
    "child_seed",
    "compose_basic",
    "compose_strong",
    "cost_by_splits",
    "cost_sensitivity_check",
    "dasgupta_cost",
    "dp_cut_subroutine",
    "enumerate_all_trees",
    "epsilon_for_subgraph",
    "exponential_mechanism_hc",
    "gen_hard_instance",
    "gen_hsbm",
    "gen_random_5cycles",
    "gen_sbm",
    "hc_dp",
    "input_perturbation_hc",
    "kernel_graph",
    "linkage_hc",
    "load_features",
    "make_tree",
    "new_graph",
    "nonprivate_hc",
    "parse_tree",
    "peel_tree",
    "perturb_graph",
    "perturb_graph_plain",
    "private_cost_release",
    "private_scalar",
    "private_select_best",
    "raw_perturbed_weights",
    "read_graph",
    "sample_laplace",
    "serialize_tree",
    "sparsity",
    "top_cut_side",
    "tree_count",
    "write_graph",
]
