"""Adaptive-budget reduction from a private balanced-cut subroutine to an HC tree.

The recursion is level-synchronous: every non-singleton subgraph on a level is
cut with a budget proportional to its share of the vertices,

    eps_H = c_level * eps * |H| / (n * log2 n),

so each level spends at most c_level * eps / log2 n and the 1/3-balance floor
caps the number of levels at 2 * log2 n.  With the default c_level = 1/2 the
ledger therefore never exceeds eps under basic composition.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .cuts import (
    CutResult,
    balance_floor,
    balanced_sparsest_cut,
    brute_force_balanced_min_cut,
)
from .errors import (
    NonBalancedCutError,
    NonPositiveEpsilonError,
    TooLargeForOracleError,
)
from .graph import WeightedGraph
from .hctree import HcTree, _hollow_node
from .mechanisms import EpsilonLedger, SeededRng, perturb_graph

DEFAULT_C_LEVEL = 0.5
MINCUT_CHECK_MAX_N = 20


def epsilon_for_subgraph(
    epsilon: float, subgraph_size: int, n: int, c_level: float = DEFAULT_C_LEVEL
) -> float:
    """Per-call budget for a subgraph of the given size at any level."""
    if epsilon <= 0:
        raise NonPositiveEpsilonError("epsilon must be positive")
    if n < 2:
        raise ValueError("the schedule needs a root graph with at least 2 vertices")
    return c_level * epsilon * subgraph_size / (n * math.log2(n))


def dp_cut_subroutine(
    h: WeightedGraph,
    eps_h: float,
    rng: SeededRng,
    overlay_c: float = 10.0,
    gamma: float = 1 / 3,
    restarts: int = 4,
) -> CutResult:
    """Reference private cut: overlay-perturb the subgraph, then sweep-cut it."""
    perturbed = perturb_graph(h, eps_h, rng, overlay_c=overlay_c)
    return balanced_sparsest_cut(perturbed, gamma, restarts, rng)


def adaptive_reduction_hc(
    g: WeightedGraph,
    epsilon: float,
    cut_subroutine: Callable[[WeightedGraph, float, SeededRng], CutResult] = dp_cut_subroutine,
    rng: SeededRng | None = None,
    c_level: float = DEFAULT_C_LEVEL,
    gamma: float = 1 / 3,
) -> tuple[HcTree, EpsilonLedger]:
    """Build an HC tree by level-synchronous private cuts with adaptive budgets.

    Every charge is recorded as (level, subgraph size, eps_H); singletons are
    skipped without charge.  Raises NonBalancedCutError if the subroutine
    returns a side below the gamma floor.
    """
    if epsilon <= 0:
        raise NonPositiveEpsilonError("epsilon must be positive")
    if rng is None:
        rng = SeededRng(0)
    ledger = EpsilonLedger(budget=epsilon)
    n = g.n
    if n == 1:
        return HcTree.leaf(0), ledger

    # frontier entries: (subgraph, original labels, parent node, attach left?)
    frontier: list[tuple[WeightedGraph, np.ndarray, HcTree | None, bool]] = [
        (g, np.arange(n), None, False)
    ]
    tree_root: HcTree | None = None
    level = 1
    call_index = 0
    while frontier:
        next_frontier: list[tuple[WeightedGraph, np.ndarray, HcTree | None, bool]] = []
        for h, labels, parent, is_left in frontier:
            if h.n == 1:
                leaf = HcTree.leaf(int(labels[0]))
                if parent is None:
                    tree_root = leaf
                elif is_left:
                    parent.left = leaf
                else:
                    parent.right = leaf
                continue
            eps_h = epsilon_for_subgraph(epsilon, h.n, n, c_level)
            cut = cut_subroutine(h, eps_h, rng.child(call_index))
            call_index += 1
            side = sorted(int(x) for x in cut.side)
            floor = balance_floor(h.n, gamma)
            small = min(len(side), h.n - len(side))
            if small < floor or len(side) == 0 or len(side) == h.n:
                raise NonBalancedCutError(
                    f"subroutine returned side of size {len(side)} on |H|={h.n}"
                    f" (floor {floor})"
                )
            ledger.charge("cut", eps_h, level=level, subgraph_size=h.n)
            node = _hollow_node(h.n)
            if parent is None:
                tree_root = node
            elif is_left:
                parent.left = node
            else:
                parent.right = node
            side_arr = np.asarray(side, dtype=np.int64)
            other = np.setdiff1d(np.arange(h.n), side_arr, assume_unique=True)
            sub_l, _ = h.induced_subgraph(side_arr)
            sub_r, _ = h.induced_subgraph(other)
            next_frontier.append((sub_l, labels[side_arr], node, True))
            next_frontier.append((sub_r, labels[other], node, False))
        frontier = next_frontier
        level += 1

    assert tree_root is not None
    return tree_root, ledger


def balanced_sparsest_to_min_cut_check(
    g: WeightedGraph, cut: CutResult, C: float, epsilon: float
) -> bool:
    """Empirical probe: does the cut 2-approximate the 1/3-balanced min cut
    up to the additive slack C*n/(2*eps*log2(n)^2)?

    Needs the exhaustive min-cut oracle, so n <= 20.
    """
    if g.n > MINCUT_CHECK_MAX_N:
        raise TooLargeForOracleError(
            f"min-cut check capped at n={MINCUT_CHECK_MAX_N}, got {g.n}"
        )
    if epsilon <= 0:
        raise NonPositiveEpsilonError("epsilon must be positive")
    reference = brute_force_balanced_min_cut(g, 1 / 3)
    slack = C * g.n / (2.0 * epsilon * math.log2(g.n) ** 2)
    return cut.cut_w <= 2.0 * reference.cut_w + slack
