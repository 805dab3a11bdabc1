"""Instance generators: block models, kernel similarity graphs, disjoint
5-cycles, and the hard complete-graph family with its peel-off witness tree.

Everything is a pure function of (parameters, rng), so fixing a seed fixes the
instance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InvalidProbabilityError,
    NonPositiveSigmaError,
    NotDivisibleBy5Error,
)
from .graph import WeightedGraph, new_graph
from .hctree import HcTree
from .mechanisms import SeededRng


def _pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All unordered pairs (u < v) of 0..n-1 as two arrays."""
    u, v = np.triu_indices(n, k=1)
    return u.astype(np.int64), v.astype(np.int64)


def gen_sbm(
    sizes: Sequence[int],
    p: float,
    q: float,
    weight_low: float = 1.0,
    weight_high: float = 10.0,
    rng: SeededRng | None = None,
) -> WeightedGraph:
    """Stochastic block model with uniform edge weights.

    Intra-block pairs appear with probability p, inter-block with q; every
    present edge gets an independent Uniform[weight_low, weight_high] weight.
    """
    if not (0 <= q <= p <= 1):
        raise InvalidProbabilityError("need 0 <= q <= p <= 1")
    if rng is None:
        rng = SeededRng(0)
    n = int(sum(sizes))
    block = np.repeat(np.arange(len(sizes)), sizes)
    u, v = _pair_arrays(n)
    prob = np.where(block[u] == block[v], p, q)
    present = rng.random(len(u)) < prob
    uu, vv = u[present], v[present]
    ww = rng.uniform(weight_low, weight_high, size=len(uu))
    return WeightedGraph(n, uu, vv, ww)


def _cluster_pairing(k: int) -> np.ndarray:
    """Sibling groups for a 2-level hierarchy: clusters (2i, 2i+1) are paired.

    Returns, per cluster, its group id; an unpaired trailing cluster forms its
    own group.
    """
    return np.arange(k) // 2


def gen_hsbm(
    sizes: Sequence[int],
    p: float,
    q_sibling: float,
    q_far: float,
    weight_low: float = 1.0,
    weight_high: float = 10.0,
    rng: SeededRng | None = None,
) -> WeightedGraph:
    """Hierarchical SBM: three pair classes (same cluster / sibling / far).

    Clusters are leaves of a two-level hierarchy: consecutive clusters are
    siblings; pair probability is p within a cluster, q_sibling between
    siblings, q_far otherwise.
    """
    if not (0 <= q_far <= q_sibling <= p <= 1):
        raise InvalidProbabilityError("need 0 <= q_far <= q_sibling <= p <= 1")
    if rng is None:
        rng = SeededRng(0)
    n = int(sum(sizes))
    block = np.repeat(np.arange(len(sizes)), sizes)
    group = _cluster_pairing(len(sizes))
    u, v = _pair_arrays(n)
    same_cluster = block[u] == block[v]
    same_group = group[block[u]] == group[block[v]]
    prob = np.where(same_cluster, p, np.where(same_group, q_sibling, q_far))
    present = rng.random(len(u)) < prob
    uu, vv = u[present], v[present]
    ww = rng.uniform(weight_low, weight_high, size=len(uu))
    return WeightedGraph(n, uu, vv, ww)


def kernel_graph(
    features: np.ndarray,
    sigma: float,
    tau: float = 1e-3,
    rescale_to_unit: bool = False,
) -> WeightedGraph:
    """Gaussian-kernel similarity graph from a feature matrix.

    w(u,v) = exp(-||x_u - x_v||^2 / (2 sigma^2)); edges below tau are dropped.
    With rescale_to_unit all kept weights are divided by the smallest kept
    weight, so the minimum becomes exactly 1 (rescaling leaves the clustering
    structure unchanged).
    """
    if sigma <= 0:
        raise NonPositiveSigmaError("sigma must be positive")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    pts = np.asarray(features, dtype=float)
    if pts.ndim != 2:
        raise ValueError("features must be a 2-D matrix (points by coordinates)")
    n = len(pts)
    u, v = _pair_arrays(n)
    sq = ((pts[u] - pts[v]) ** 2).sum(axis=1)
    w = np.exp(-sq / (2.0 * sigma * sigma))
    keep = w >= tau
    uu, vv, ww = u[keep], v[keep], w[keep]
    if rescale_to_unit and len(ww):
        ww = ww / ww.min()  # x / x is exactly 1.0, so min weight is exactly 1
    return WeightedGraph(n, uu, vv, ww.astype(float))


def load_features(path, skip_header: bool = False) -> np.ndarray:
    """Feature CSV: one point per row, comma-separated decimals."""
    return np.loadtxt(path, delimiter=",", skiprows=1 if skip_header else 0, ndmin=2)


def _sample_disjoint_5cycles(n: int, rng: SeededRng) -> list[list[int]]:
    """Uniform partition into n/5 groups, each in uniformly random cycle order."""
    if n % 5 != 0 or n < 5:
        raise NotDivisibleBy5Error("n must be a positive multiple of 5")
    perm = [int(x) for x in rng.permutation(n)]
    return [perm[i : i + 5] for i in range(0, n, 5)]


def _cycle_edges(cycles: list[list[int]]) -> list[tuple[int, int]]:
    edges = []
    for cyc in cycles:
        for i in range(5):
            a, b = cyc[i], cyc[(i + 1) % 5]
            edges.append((min(a, b), max(a, b)))
    return edges


def gen_random_5cycles(n: int, rng: SeededRng | None = None) -> WeightedGraph:
    """Disjoint unit-weight 5-cycles covering all n vertices (n % 5 == 0)."""
    if rng is None:
        rng = SeededRng(0)
    cycles = _sample_disjoint_5cycles(n, rng)
    return new_graph(n, [(a, b, 1.0) for a, b in _cycle_edges(cycles)])


@dataclass(frozen=True)
class HardInstance:
    """Complete graph hiding disjoint heavy 5-cycles among near-zero weights.

    graph: the complete weighted graph;
    cycles: the sampled cycles as vertex sequences in cycle order;
    heavy_weight: W = 1/(20 eps) on cycle edges;
    light_weight: 1/n^3 on all other edges.
    """

    graph: WeightedGraph
    cycles: tuple[tuple[int, ...], ...]
    heavy_weight: float
    light_weight: float

    @property
    def cycle_edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(_cycle_edges([list(c) for c in self.cycles]))


def gen_hard_instance(n: int, epsilon: float, rng: SeededRng | None = None) -> HardInstance:
    """The hard family: K_n with weight 1/(20 eps) on hidden 5-cycles, 1/n^3 elsewhere."""
    if rng is None:
        rng = SeededRng(0)
    if epsilon >= 1 / 20:
        warnings.warn(
            "epsilon >= 1/20 puts cycle weights at or below 1; the hard regime needs eps < 1/20",
            stacklevel=2,
        )
    cycles = _sample_disjoint_5cycles(n, rng)
    heavy = 1.0 / (20.0 * epsilon)
    light = 1.0 / n**3
    u, v = _pair_arrays(n)
    w = np.full(len(u), light)
    ha = np.array([a for a, _ in _cycle_edges(cycles)], dtype=np.int64)
    hb = np.array([b for _, b in _cycle_edges(cycles)], dtype=np.int64)
    # lexicographic pair (a, b) sits at index a*(2n-a-1)/2 + (b-a-1)
    w[ha * (2 * n - ha - 1) // 2 + (hb - ha - 1)] = heavy
    graph = WeightedGraph(n, u, v, w)
    return HardInstance(graph, tuple(tuple(c) for c in cycles), heavy, light)


def peel_tree(hard: HardInstance) -> HcTree:
    """Witness tree: separate whole cycles by balanced grouping, then peel each
    5-cycle one vertex per level along the cycle order.

    Each cycle's heavy edges pay W * (10 + 4 + 3 + 2) = 19 W, and the light
    edges pay at most 1/2 in total, so the cost is at most (19 n / 5) W + 1/2.
    """

    def cycle_subtree(cyc: tuple[int, ...]) -> HcTree:
        node = HcTree.node(HcTree.leaf(cyc[3]), HcTree.leaf(cyc[4]))
        node = HcTree.node(HcTree.leaf(cyc[2]), node)
        node = HcTree.node(HcTree.leaf(cyc[1]), node)
        return HcTree.node(HcTree.leaf(cyc[0]), node)

    subtrees = [cycle_subtree(c) for c in hard.cycles]

    def group(lo: int, hi: int) -> HcTree:
        # balanced binary grouping over subtrees[lo:hi]
        if hi - lo == 1:
            return subtrees[lo]
        mid = (lo + hi) // 2
        left = group(lo, mid)
        right = group(mid, hi)
        return HcTree.node(left, right)

    return group(0, len(subtrees))
