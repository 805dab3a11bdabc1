"""Edge expansion and balanced cut solvers.

Two routes are kept deliberately separate: exhaustive bitmask oracles for
small graphs, and a scalable heuristic (Fiedler-vector sweep over balanced
prefixes, plus component grouping and random safety cuts) for everything else.
Every solver returns the canonical smaller side with deterministic
lexicographic tie-breaking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse import coo_matrix

from .errors import (
    EmptyOrFullSideError,
    SingletonGraphError,
    TooLargeForOracleError,
)
from .graph import WeightedGraph

ORACLE_MAX_N = 24

_POPCOUNT16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)


@dataclass(frozen=True)
class CutResult:
    """A cut, canonicalized to its smaller side.

    side: sorted labels of the smaller side (ties: the side containing the
          lexicographically smallest vertex);
    cut_w: crossing weight w(S, S-bar);
    expansion: cut_w / min(|S|, n - |S|);
    balance: min(|S|, n - |S|) / n.
    """

    side: tuple[int, ...]
    cut_w: float
    expansion: float
    balance: float


def balance_floor(n: int, gamma: float) -> int:
    """Smallest allowed size of the smaller side of a gamma-balanced cut."""
    if n < 2:
        raise SingletonGraphError("cuts need at least two vertices")
    if n <= 3:
        return 1
    return max(1, min(math.ceil(gamma * n), n // 2))


def sparsity(g: WeightedGraph, side: Iterable[int]) -> float:
    """Edge expansion of a subset: crossing weight over the smaller side size."""
    side = list(side)
    k = len(set(side))
    if k == 0 or k == g.n:
        raise EmptyOrFullSideError("expansion needs a proper nonempty subset")
    return g.cut_weight(side) / min(k, g.n - k)


def canonical_cut(g: WeightedGraph, side: Iterable[int]) -> CutResult:
    """Canonicalize an arbitrary proper subset into a CutResult."""
    mask = g.side_mask(side)
    k = int(mask.sum())
    if k == 0 or k == g.n:
        raise EmptyOrFullSideError("cut side must be a proper nonempty subset")
    if k > g.n - k or (2 * k == g.n and not mask[0]):
        mask = ~mask
        k = g.n - k
    u, v = g.endpoints
    cut_w = float(g.weights[mask[u] ^ mask[v]].sum())
    return CutResult(
        side=tuple(int(x) for x in np.flatnonzero(mask)),
        cut_w=cut_w,
        expansion=cut_w / k,
        balance=k / g.n,
    )


# -- exhaustive oracles ---------------------------------------------------

def _popcount(masks: np.ndarray) -> np.ndarray:
    return (_POPCOUNT16[masks & 0xFFFF] + _POPCOUNT16[(masks >> 16) & 0xFFFF]).astype(np.int64)


def _oracle(g: WeightedGraph, gamma: float, objective: str) -> CutResult:
    n = g.n
    if n < 2:
        raise SingletonGraphError("oracle needs at least two vertices")
    if n > ORACLE_MAX_N:
        raise TooLargeForOracleError(f"exhaustive oracle capped at n={ORACLE_MAX_N}, got {n}")
    lo = balance_floor(n, gamma)
    u = g.endpoints[0].astype(np.uint32)
    v = g.endpoints[1].astype(np.uint32)
    w = g.weights

    best_obj = np.inf
    best_masks: list[int] = []
    total = 1 << (n - 1)  # fix vertex n-1 outside the enumerated set
    chunk = 1 << 20
    for start in range(1, total, chunk):
        stop = min(start + chunk, total)
        masks = np.arange(start, stop, dtype=np.uint32)
        sizes = _popcount(masks)
        small = np.minimum(sizes, n - sizes)
        valid = small >= lo
        if not valid.any():
            continue
        masks = masks[valid]
        small = small[valid]
        cutw = np.zeros(len(masks))
        for a, b, c in zip(u, v, w):
            cutw += c * (((masks >> a) ^ (masks >> b)) & 1)
        obj = cutw / small if objective == "sparsest" else cutw
        lo_obj = float(obj.min())
        if lo_obj < best_obj:
            best_obj = lo_obj
            best_masks = [int(m) for m in masks[obj == lo_obj]]
        elif lo_obj == best_obj:
            best_masks.extend(int(m) for m in masks[obj == lo_obj])

    full = (1 << n) - 1

    def canonical_side(mask: int) -> tuple[int, ...]:
        comp = full ^ mask
        s = bin(mask).count("1")
        if s * 2 < n:
            pick = mask
        elif s * 2 > n:
            pick = comp
        else:
            pick = mask if mask & 1 else comp  # tie: keep the side holding vertex 0
        return tuple(i for i in range(n) if pick >> i & 1)

    best_side = min(canonical_side(m) for m in best_masks)
    cut_w = g.cut_weight(best_side)
    k = len(best_side)
    return CutResult(best_side, cut_w, cut_w / k, k / n)


def brute_force_balanced_sparsest_cut(g: WeightedGraph, gamma: float = 1 / 3) -> CutResult:
    """Minimum-expansion cut over all sides meeting the balance floor (n <= 24)."""
    return _oracle(g, gamma, "sparsest")


def brute_force_balanced_min_cut(g: WeightedGraph, gamma: float = 1 / 3) -> CutResult:
    """Minimum-weight cut over all sides meeting the balance floor (n <= 24)."""
    return _oracle(g, gamma, "mincut")


def brute_force_sparsest_cut(g: WeightedGraph) -> CutResult:
    """Global sparsest cut: no balance requirement beyond nonemptiness."""
    return _oracle(g, 1.0 / g.n, "sparsest")


# -- scalable heuristic ---------------------------------------------------

def _fiedler_vectors(
    g: WeightedGraph, rng, max_iter: int = 500, tol: float = 1e-8, extra_starts: int = 2
) -> list[np.ndarray]:
    """Approximate Fiedler vectors by power iteration on the shifted Laplacian.

    M = cI - L has the Fiedler direction as its dominant eigenvector once the
    all-ones component is projected out.  Power iteration can stall on an
    eigenvector orthogonal to the start (symmetric graphs make the degree
    start degenerate), so seeded random restarts run alongside the
    deterministic one and every converged vector is returned for sweeping.
    """
    n = g.n
    u, v = g.endpoints
    w = g.weights
    deg = g.weighted_degrees()
    c = 2.0 * deg.max() + 1.0
    if n <= 128:  # dense matvec has far less per-iteration overhead at this size
        lap = np.zeros((n, n))
        np.add.at(lap, (u, v), -w)
        np.add.at(lap, (v, u), -w)
        lap[np.arange(n), np.arange(n)] = deg
    else:
        lap = coo_matrix(
            (
                np.concatenate([-w, -w, deg]),
                (np.concatenate([u, v, np.arange(n)]), np.concatenate([v, u, np.arange(n)])),
            ),
            shape=(n, n),
        ).tocsr()

    def project(x: np.ndarray) -> np.ndarray:
        return x - x.mean()

    def run(x: np.ndarray) -> np.ndarray | None:
        x = project(x)
        norm = np.linalg.norm(x)
        if norm < 1e-12:
            return None
        x /= norm
        for _ in range(max_iter):
            y = c * x - lap @ x
            y = project(y)
            norm = np.linalg.norm(y)
            if norm < 1e-12:
                return None
            y /= norm
            if np.linalg.norm(y - x) < tol:
                return y
            x = y
        return x

    starts = [deg.astype(float)]
    if rng is not None:
        for _ in range(extra_starts):
            starts.append(rng.random(n) - 0.5)
    else:
        starts.append(project(np.arange(n, dtype=float)))
    vectors = [vec for vec in (run(s) for s in starts) if vec is not None]
    if not vectors:
        fallback = project(np.arange(n, dtype=float))
        vectors.append(fallback / np.linalg.norm(fallback))
    return vectors


def _sweep_candidates(g: WeightedGraph, order: np.ndarray, lo: int) -> list[tuple[float, int]]:
    """Expansion of every balanced prefix cut of `order`: list of (psi, k)."""
    n = g.n
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    u, v = g.endpoints
    pu, pv = pos[u], pos[v]
    lo_pos = np.minimum(pu, pv)
    hi_pos = np.maximum(pu, pv)
    # edge crosses prefix k (first k vertices) for k in (lo_pos, hi_pos]
    diff = np.zeros(n + 1)
    np.add.at(diff, lo_pos + 1, g.weights)
    np.add.at(diff, hi_pos + 1, -g.weights)
    cutw = np.cumsum(diff)[: n]  # cutw[k] = crossing weight of prefix of size k
    out = []
    for k in range(lo, n - lo + 1):
        out.append((cutw[k] / min(k, n - k), k))
    return out


def _component_grouping(comps: list[list[int]]) -> list[int]:
    """Greedy bin packing of components (largest first) into two sides."""
    bins: list[list[int]] = [[], []]
    sizes = [0, 0]
    for comp in comps:
        i = 0 if sizes[0] <= sizes[1] else 1
        bins[i].extend(comp)
        sizes[i] += len(comp)
    smaller = min(bins, key=lambda b: (len(b), sorted(b)))
    return smaller


def balanced_sparsest_cut(
    g: WeightedGraph,
    gamma: float = 1 / 3,
    restarts: int = 4,
    rng=None,
) -> CutResult:
    """Best balanced cut found by sweep, component grouping, and random floors.

    Never returns worse than the best candidate examined; the returned side
    always satisfies the balance floor.
    """
    n = g.n
    if n < 2:
        raise SingletonGraphError("cannot cut a single vertex")
    lo = balance_floor(n, gamma)
    if n == 2:
        return canonical_cut(g, [0])

    candidates: list[CutResult] = []
    comps = g.connected_components(positive_only=True)

    orders: list[np.ndarray] = []
    if len(comps) > 1:
        side = _component_grouping(comps)
        if lo <= len(side) and len(side) <= n - lo:
            candidates.append(canonical_cut(g, side))
        # Sweep order: small components first, then the giant component along
        # its own Fiedler directions, so prefixes can cut through the giant.
        giant = comps[0]
        rest = sorted(x for comp in comps[1:] for x in comp)
        sub, _ = g.induced_subgraph(giant)
        if sub.n >= 2:
            for fied in _fiedler_vectors(sub, rng):
                giant_order = [giant[i] for i in np.argsort(fied, kind="stable")]
                orders.append(np.array(rest + giant_order, dtype=np.int64))
        else:
            orders.append(np.array(rest + list(giant), dtype=np.int64))
    else:
        for fied in _fiedler_vectors(g, rng):
            orders.append(np.argsort(fied, kind="stable"))

    for order in orders:
        sweep = _sweep_candidates(g, order, lo)
        if not sweep:
            continue
        best_psi = min(s[0] for s in sweep)
        for psi, k in sweep:
            if psi == best_psi:
                candidates.append(canonical_cut(g, order[:k]))

    if rng is not None:
        for _ in range(restarts):
            size = int(rng.integers(lo, n // 2 + 1))
            side = rng.choice(n, size=size, replace=False)
            candidates.append(canonical_cut(g, side))

    if not candidates:  # no rng and degenerate sweep; balanced prefix fallback
        candidates.append(canonical_cut(g, orders[0][:lo]))

    best = min(candidates, key=lambda c: (c.expansion, c.side))
    return best
