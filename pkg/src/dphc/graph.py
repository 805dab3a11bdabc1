"""Immutable weighted-graph data model: construction, cuts, induced subgraphs, file I/O.

Vertices are dense integers 0..n-1.  Edges are undirected, stored once with
u < v, sorted, with nonnegative double-precision weights.  Graphs are never
mutated; every transformation builds a new graph.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateEdgeError,
    EmptyOrFullSideError,
    EmptySetError,
    EndpointOutOfRangeError,
    InvalidHeaderError,
    NegativeWeightError,
    ParseError,
    SelfLoopError,
)

Edge = tuple[int, int, float]


class WeightedGraph:
    """Undirected weighted graph on vertex labels 0..n-1.

    Internally keeps three parallel read-only numpy arrays (u, v, w) sorted by
    (u, v) with u < v.  Instances are safe to share across threads.
    """

    __slots__ = ("n", "_u", "_v", "_w")

    def __init__(self, n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray):
        # Trusted constructor: arrays must already be validated and normalized.
        # Use new_graph() for checked construction from an edge list.
        self.n = int(n)
        self._u = u
        self._v = v
        self._w = w
        for arr in (u, v, w):
            arr.setflags(write=False)

    # -- basic accessors -------------------------------------------------

    @property
    def m(self) -> int:
        return len(self._w)

    @property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Read-only (u, v) arrays, u < v."""
        return self._u, self._v

    @property
    def weights(self) -> np.ndarray:
        """Read-only weight array aligned with endpoints."""
        return self._w

    @property
    def edges(self) -> list[Edge]:
        return [(int(a), int(b), float(c)) for a, b, c in zip(self._u, self._v, self._w)]

    def min_weight(self) -> float:
        if self.m == 0:
            raise EmptySetError("min_weight is undefined on an edgeless graph")
        return float(self._w.min())

    def total_weight(self) -> float:
        return float(self._w.sum())

    def weighted_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n)
        np.add.at(deg, self._u, self._w)
        np.add.at(deg, self._v, self._w)
        return deg

    def with_weights(self, new_w: np.ndarray) -> "WeightedGraph":
        """Same topology with replacement weights (must be >= 0)."""
        new_w = np.asarray(new_w, dtype=float)
        if new_w.shape != self._w.shape:
            raise ValueError("weight vector length does not match edge count")
        if np.any(new_w < 0):
            raise NegativeWeightError("replacement weights must be nonnegative")
        return WeightedGraph(self.n, self._u, self._v, new_w.copy())

    # -- equality / repr -------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and bool(np.array_equal(self._u, other._u))
            and bool(np.array_equal(self._v, other._v))
            and bool(np.array_equal(self._w, other._w))
        )

    def __hash__(self):
        return hash((self.n, self.m, self._w.tobytes()))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m})"

    # -- cut / subgraph queries -------------------------------------------

    def side_mask(self, side: Iterable[int]) -> np.ndarray:
        """Boolean membership mask for a vertex subset, validating labels."""
        idx = np.asarray(list(side), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise EndpointOutOfRangeError("vertex label outside 0..n-1")
        mask = np.zeros(self.n, dtype=bool)
        mask[idx] = True
        return mask

    def cut_weight(self, side: Iterable[int]) -> float:
        """Total weight of edges with exactly one endpoint in `side`."""
        mask = self.side_mask(side)
        k = int(mask.sum())
        if k == 0 or k == self.n:
            raise EmptyOrFullSideError("cut side must be a proper nonempty subset")
        crossing = mask[self._u] ^ mask[self._v]
        return float(self._w[crossing].sum())

    def induced_subgraph(self, subset: Iterable[int]) -> tuple["WeightedGraph", dict[int, int]]:
        """Subgraph on `subset`, relabeled densely to 0..|subset|-1.

        Returns the subgraph and the old->new label map (sorted order).
        """
        mask = self.side_mask(subset)
        keep_vertices = np.flatnonzero(mask)
        if keep_vertices.size == 0:
            raise EmptySetError("induced subgraph needs a nonempty vertex set")
        relabel = np.full(self.n, -1, dtype=np.int64)
        relabel[keep_vertices] = np.arange(keep_vertices.size)
        keep = mask[self._u] & mask[self._v]
        # relabel is monotone on the kept vertices, so (u, v) sort order survives
        sub = WeightedGraph(
            keep_vertices.size,
            relabel[self._u[keep]],
            relabel[self._v[keep]],
            self._w[keep].copy(),
        )
        return sub, {int(old): int(new) for new, old in enumerate(keep_vertices)}

    def connected_components(self, positive_only: bool = False) -> list[list[int]]:
        """Vertex lists of connected components, largest first (ties: smallest label).

        With positive_only, zero-weight edges are ignored, which is the notion
        the cut solvers care about.
        """
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import connected_components as _cc

        if positive_only:
            sel = self._w > 0
            uu, vv = self._u[sel], self._v[sel]
        else:
            uu, vv = self._u, self._v
        adj = coo_matrix((np.ones(len(uu)), (uu, vv)), shape=(self.n, self.n))
        ncomp, labels = _cc(adj, directed=False)
        comps: list[list[int]] = [[] for _ in range(ncomp)]
        for vertex, comp in enumerate(labels):
            comps[comp].append(vertex)
        comps.sort(key=lambda c: (-len(c), c[0]))
        return comps

    def is_connected(self) -> bool:
        return len(self.connected_components()) <= 1


def new_graph(n: int, edges: Sequence[tuple[int, int, float]]) -> WeightedGraph:
    """Validated construction from an edge list.

    Normalizes to u < v and sorts; rejects self-loops, duplicate unordered
    pairs, negative weights, and out-of-range endpoints.
    """
    if n < 1:
        raise EmptySetError("graph needs at least one vertex")
    m = len(edges)
    u = np.empty(m, dtype=np.int64)
    v = np.empty(m, dtype=np.int64)
    w = np.empty(m, dtype=float)
    for i, (a, b, c) in enumerate(edges):
        a, b = int(a), int(b)
        if a == b:
            raise SelfLoopError(f"self-loop at vertex {a}")
        if not (0 <= a < n and 0 <= b < n):
            raise EndpointOutOfRangeError(f"edge ({a},{b}) outside 0..{n - 1}")
        if a > b:
            a, b = b, a
        c = float(c)
        if c < 0 or not np.isfinite(c):
            raise NegativeWeightError(f"edge ({a},{b}) has invalid weight {c}")
        u[i], v[i], w[i] = a, b, c
    order = np.lexsort((v, u))
    u, v, w = u[order], v[order], w[order]
    if m > 1:
        dup = (u[1:] == u[:-1]) & (v[1:] == v[:-1])
        if dup.any():
            i = int(np.flatnonzero(dup)[0])
            raise DuplicateEdgeError(f"duplicate edge ({u[i]},{v[i]})")
    return WeightedGraph(n, u, v, w)


# -- edge-list file format ----------------------------------------------
#
#   first line:  "n m"
#   then m lines "u v w"   (0-indexed, u < v, decimal weight)
#   '#' starts a comment line; LF endings.

def write_graph(g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for a, b, c in zip(g._u, g._v, g._w):
            fh.write(f"{a} {b} {c:.12g}\n")


def read_graph(path) -> WeightedGraph:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.readlines()

    header = None
    header_line = 0
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        header = stripped
        header_line = lineno
        break
    if header is None:
        raise InvalidHeaderError(f"{path}: no header line found")
    parts = header.split()
    if len(parts) != 2:
        raise InvalidHeaderError(f"{path}:{header_line}: header must be 'n m'")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise InvalidHeaderError(f"{path}:{header_line}: header must be two integers") from None
    if n < 1 or m < 0:
        raise InvalidHeaderError(f"{path}:{header_line}: header out of range")

    edges: list[Edge] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(lines[header_line:], start=header_line + 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 3:
            raise ParseError(f"{path}:{lineno}: expected 'u v w'")
        try:
            a, b = int(fields[0]), int(fields[1])
            c = float(fields[2])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: malformed edge line") from None
        if a == b:
            raise ParseError(f"{path}:{lineno}: self-loop ({a},{b})")
        if a > b:
            raise ParseError(f"{path}:{lineno}: endpoints must satisfy u < v")
        if not (0 <= a < n and b < n):
            raise ParseError(f"{path}:{lineno}: endpoint outside 0..{n - 1}")
        if c < 0:
            raise ParseError(f"{path}:{lineno}: negative weight {c}")
        if (a, b) in seen:
            raise ParseError(f"{path}:{lineno}: duplicate edge ({a},{b})")
        seen.add((a, b))
        edges.append((a, b, c))
    if len(edges) != m:
        raise ParseError(f"{path}: header promised {m} edges, found {len(edges)}")
    return new_graph(n, edges)
