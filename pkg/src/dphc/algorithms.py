"""End-to-end private hierarchical clustering algorithms and baselines.

The main algorithm perturbs the input once (overlay plus Laplace noise) and
then recursively cuts the perturbed graph; everything after the single noise
pass is post-processing, so one epsilon charge covers the whole run.  The
baselines share the recursion and the perturbation primitives so comparisons
isolate the mechanism differences.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .cuts import balanced_sparsest_cut
from .errors import (
    NonPositiveEpsilonError,
    TooLargeForEnumerationError,
    UnknownMethodError,
)
from .graph import WeightedGraph
from .hctree import (
    ENUMERATION_MAX_N,
    HcTree,
    dasgupta_cost,
    enumerate_all_trees,
    make_tree,
    tree_count,
)
from .mechanisms import (
    EpsilonLedger,
    SeededRng,
    perturb_graph,
    perturb_graph_plain,
    private_cost_release,
)

LINKAGE_METHODS = ("single", "average", "complete")


@dataclass
class HcAlgorithmConfig:
    """Knobs shared by the recursive algorithms.

    epsilon: privacy budget for the run;
    overlay_c: deterministic shift coefficient (overlay adds overlay_c*ln(n)/eps);
    gamma: balance floor fraction for every cut;
    restarts: random safety cuts per solver call;
    seed: master seed for the run's rng;
    noise_disabled: zero out noise draws (test mode, no privacy claim).
    """

    epsilon: float
    overlay_c: float = 10.0
    gamma: float = 1 / 3
    restarts: int = 4
    seed: int = 0
    noise_disabled: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise NonPositiveEpsilonError("epsilon must be positive")
        if not (0 < self.gamma < 0.5):
            raise ValueError("gamma must lie in (0, 1/2)")


def _recursive_cut_tree(g: WeightedGraph, cfg: HcAlgorithmConfig, rng: SeededRng) -> HcTree:
    def cut_fn(h: WeightedGraph):
        return balanced_sparsest_cut(h, cfg.gamma, cfg.restarts, rng)

    return make_tree(g, cut_fn)


def _warn_if_disconnected(g: WeightedGraph) -> None:
    if not g.is_connected():
        warnings.warn("input graph is disconnected; proceeding anyway", stacklevel=3)


def hc_dp(g: WeightedGraph, cfg: HcAlgorithmConfig, ledger: EpsilonLedger | None = None) -> HcTree:
    """Private HC: perturb once with the overlay, then recursive balanced cuts.

    The recursion only ever sees the perturbed weights, so the single
    perturbation charge is the entire privacy cost of the run.
    """
    _warn_if_disconnected(g)
    rng = SeededRng(cfg.seed)
    perturbed = perturb_graph(
        g, cfg.epsilon, rng, overlay_c=cfg.overlay_c, ledger=ledger,
        noise_disabled=cfg.noise_disabled,
    )
    return _recursive_cut_tree(perturbed, cfg, rng)


def input_perturbation_hc(
    g: WeightedGraph, cfg: HcAlgorithmConfig, ledger: EpsilonLedger | None = None
) -> HcTree:
    """Baseline: plain Lap(1/eps) noise on each weight, then recursive cuts."""
    rng = SeededRng(cfg.seed)
    perturbed = perturb_graph_plain(
        g, cfg.epsilon, rng, ledger=ledger, noise_disabled=cfg.noise_disabled
    )
    return _recursive_cut_tree(perturbed, cfg, rng)


def nonprivate_hc(g: WeightedGraph, cfg: HcAlgorithmConfig) -> HcTree:
    """Recursive balanced cuts on the unmodified graph; no privacy charge."""
    rng = SeededRng(cfg.seed)
    return _recursive_cut_tree(g, cfg, rng)


def linkage_hc(
    g: WeightedGraph,
    cfg: HcAlgorithmConfig,
    method: str,
    ledger: EpsilonLedger | None = None,
) -> HcTree:
    """Agglomerative baseline on the perturbed graph (same scheme as hc_dp).

    Weights are similarities: each step merges the cluster pair of maximum
    linkage, where single/complete/average take the max/min/mean similarity
    over all vertex pairs between the clusters (absent pairs count as 0).
    Ties pick the pair with the smallest (min label, max label) clusters.
    """
    if method not in LINKAGE_METHODS:
        raise UnknownMethodError(f"unknown linkage method {method!r}")
    rng = SeededRng(cfg.seed)
    perturbed = perturb_graph(
        g, cfg.epsilon, rng, overlay_c=cfg.overlay_c, ledger=ledger,
        noise_disabled=cfg.noise_disabled,
    )

    n = g.n
    if n == 1:
        return HcTree.leaf(0)
    sim = np.zeros((n, n))
    u, v = perturbed.endpoints
    sim[u, v] = perturbed.weights
    sim[v, u] = perturbed.weights

    link = sim.copy()
    np.fill_diagonal(link, -np.inf)
    active = np.ones(n, dtype=bool)
    counts = np.ones(n, dtype=np.int64)  # leaves per cluster, for the average update
    min_label = list(range(n))
    trees = [HcTree.leaf(i) for i in range(n)]

    for _ in range(n - 1):
        best = link.max()
        ii, jj = np.nonzero(link == best)
        # ties by the clusters' (min label, max label), smallest first
        pair = min(
            ((a, b) for a, b in zip(ii, jj) if a < b),
            key=lambda p: tuple(sorted((min_label[p[0]], min_label[p[1]]))),
        )
        i, j = int(pair[0]), int(pair[1])
        li, lj = (i, j) if min_label[i] <= min_label[j] else (j, i)
        merged = HcTree.node(trees[li], trees[lj])
        # cluster i absorbs j
        others = np.flatnonzero(active)
        others = others[(others != i) & (others != j)]
        if others.size:
            if method == "single":
                new = np.maximum(link[i, others], link[j, others])
            elif method == "complete":
                new = np.minimum(link[i, others], link[j, others])
            else:
                new = (counts[i] * link[i, others] + counts[j] * link[j, others]) / (
                    counts[i] + counts[j]
                )
            link[i, others] = new
            link[others, i] = new
        counts[i] += counts[j]
        min_label[i] = min(min_label[i], min_label[j])
        trees[i] = merged
        active[j] = False
        link[j, :] = -np.inf
        link[:, j] = -np.inf
    root = trees[int(np.flatnonzero(active)[0])]
    return root


def exponential_mechanism_hc(
    g: WeightedGraph,
    epsilon: float,
    rng: SeededRng,
    ledger: EpsilonLedger | None = None,
) -> HcTree:
    """Sample a tree with probability proportional to exp(-eps*cost/(2n)).

    Enumerates every labeled topology, so it is exponential in n and capped at
    n = 10; the cost sensitivity n gives the 2n denominator.  Charges eps.
    """
    if epsilon <= 0:
        raise NonPositiveEpsilonError("epsilon must be positive")
    n = g.n
    if n > ENUMERATION_MAX_N:
        raise TooLargeForEnumerationError(
            f"exponential mechanism is infeasible beyond n={ENUMERATION_MAX_N}, got {n}"
        )
    count = tree_count(n)
    costs = np.empty(count)
    for idx, tree in enumerate(enumerate_all_trees(n)):
        costs[idx] = dasgupta_cost(g, tree)

    scores = -epsilon * costs / (2.0 * n)
    scores -= scores.max()
    probs = np.exp(scores)
    probs /= probs.sum()
    draw = float(rng.random())
    target = int(np.searchsorted(np.cumsum(probs), draw, side="right"))
    target = min(target, count - 1)

    if ledger is not None:
        ledger.charge("exponential_mechanism_hc", epsilon)
    for idx, tree in enumerate(enumerate_all_trees(n)):
        if idx == target:
            return tree
    raise AssertionError("enumeration ended before the sampled index")


def blended_hc(
    g: WeightedGraph,
    epsilon: float,
    rng: SeededRng,
    ledger: EpsilonLedger | None = None,
    noise_disabled: bool = False,
) -> HcTree:
    """Run the recursive algorithm and the exponential mechanism at eps/4 each,
    evaluate both privately at eps/4 each, and keep the lower release.

    Four charges of eps/4, so the total budget is exactly eps.
    """
    if epsilon <= 0:
        raise NonPositiveEpsilonError("epsilon must be positive")
    quarter = epsilon / 4.0
    cfg = HcAlgorithmConfig(
        epsilon=quarter, seed=int(rng.child(0).seed), noise_disabled=noise_disabled
    )
    tree_a = hc_dp(g, cfg, ledger)
    tree_b = exponential_mechanism_hc(g, quarter, rng.child(1), ledger)
    release_a = private_cost_release(
        g, tree_a, quarter, rng.child(2), ledger, noise_disabled
    )
    release_b = private_cost_release(
        g, tree_b, quarter, rng.child(3), ledger, noise_disabled
    )
    return tree_a if release_a <= release_b else tree_b


def top_cut_side(tree: HcTree) -> list[int]:
    """Smaller side of the root split (ties: the left child)."""
    if tree.is_leaf:
        raise ValueError("a single leaf has no root split")
    left, right = tree.left, tree.right
    side = left if left.size <= right.size else right
    return sorted(side.leaves())
