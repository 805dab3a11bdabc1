"""Binary HC trees, the Dasgupta cost, exact small-instance oracles, and text I/O.

The cost of a tree charges every edge its weight times the leaf count of the
lowest common ancestor of its endpoints.  All tree walks are iterative so deep
caterpillar trees (from linkage baselines) never hit the recursion limit.
"""

from __future__ import annotations

from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    LeafMismatchError,
    NegativeResultingWeightError,
    ParseError,
    TooLargeForEnumerationError,
    TooLargeForOracleError,
)
from .graph import WeightedGraph

_SMALL_COST_N = 32  # below this, per-node bitmask evaluation beats the RMQ setup

OPTIMAL_TREE_MAX_N = 14
ENUMERATION_MAX_N = 10


class HcTree:
    """Rooted binary tree whose leaves carry distinct vertex labels."""

    __slots__ = ("label", "left", "right", "size")

    def __init__(self, label=None, left=None, right=None):
        self.label = label
        self.left = left
        self.right = right
        self.size = 1 if label is not None else left.size + right.size

    @staticmethod
    def leaf(label: int) -> "HcTree":
        return HcTree(label=int(label))

    @staticmethod
    def node(left: "HcTree", right: "HcTree") -> "HcTree":
        return HcTree(left=left, right=right)

    @property
    def is_leaf(self) -> bool:
        return self.label is not None

    def leaves(self) -> list[int]:
        """Leaf labels in left-to-right order."""
        out: list[int] = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.label)
            else:
                stack.append(node.right)
                stack.append(node.left)
        return out

    def depth(self) -> int:
        """Edge count of the longest root-to-leaf path."""
        best = 0
        stack = [(self, 0)]
        while stack:
            node, d = stack.pop()
            if node.is_leaf:
                best = max(best, d)
            else:
                stack.append((node.left, d + 1))
                stack.append((node.right, d + 1))
        return best

    def internal_nodes(self) -> Iterator["HcTree"]:
        stack = [self]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                yield node
                stack.append(node.right)
                stack.append(node.left)

    def splits(self) -> Iterator[tuple[list[int], list[int]]]:
        """(left leaves, right leaves) for every internal node."""
        for node in self.internal_nodes():
            yield node.left.leaves(), node.right.leaves()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HcTree):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a.is_leaf != b.is_leaf or a.size != b.size:
                return False
            if a.is_leaf:
                if a.label != b.label:
                    return False
            else:
                stack.append((a.left, b.left))
                stack.append((a.right, b.right))
        return True

    def __hash__(self):
        return hash(serialize_tree(self))

    def __repr__(self) -> str:
        return f"HcTree({serialize_tree(self)})"


def _check_leaves(g: WeightedGraph, tree: HcTree) -> None:
    labels = tree.leaves()
    if len(labels) != g.n or set(labels) != set(range(g.n)):
        raise LeafMismatchError("tree leaves must be exactly the graph's vertices")


def _hollow_node(size: int) -> HcTree:
    # Internal node whose children are attached later (iterative builders).
    node = HcTree.__new__(HcTree)
    node.label = None
    node.left = None
    node.right = None
    node.size = size
    return node


# -- Dasgupta cost ------------------------------------------------------

def _cost_small(g: WeightedGraph, tree: HcTree) -> float:
    # Per-node evaluation: cost = sum over splits of |node| * w(left, right).
    # Leaf bitmasks make the membership tests O(1) per edge.
    u, v = g.endpoints
    ebits = [(1 << int(a), 1 << int(b), float(c)) for a, b, c in zip(u, v, g.weights)]
    cost = 0.0
    masks: dict[int, int] = {}
    stack: list[tuple[HcTree, bool]] = [(tree, False)]
    while stack:
        node, expanded = stack.pop()
        if node.is_leaf:
            masks[id(node)] = 1 << node.label
            continue
        if not expanded:
            stack.append((node, True))
            stack.append((node.left, False))
            stack.append((node.right, False))
            continue
        lm = masks.pop(id(node.left))
        rm = masks.pop(id(node.right))
        masks[id(node)] = lm | rm
        crossing = 0.0
        for bit_a, bit_b, c in ebits:
            if (lm & bit_a and rm & bit_b) or (lm & bit_b and rm & bit_a):
                crossing += c
        cost += node.size * crossing
    return cost


def _euler_tour(tree: HcTree):
    """Euler tour arrays for O(1) LCA queries via range-minimum on depth."""
    euler_depth: list[int] = []
    euler_size: list[int] = []
    first_of_leaf: dict[int, int] = {}
    # Entries: (node, depth, revisit) -- internal nodes are re-appended between
    # and after their children to produce the standard Euler tour.
    stack: list[tuple[HcTree, int, bool]] = [(tree, 0, False)]
    while stack:
        node, d, revisit = stack.pop()
        pos = len(euler_depth)
        euler_depth.append(d)
        euler_size.append(node.size)
        if node.is_leaf:
            first_of_leaf[node.label] = pos
        elif not revisit:
            stack.append((node.right, d + 1, False))
            stack.append((node, d, True))
            stack.append((node.left, d + 1, False))
    return np.array(euler_depth), np.array(euler_size), first_of_leaf


def _cost_rmq(g: WeightedGraph, tree: HcTree) -> float:
    depth, sizes, first = _euler_tour(tree)
    length = len(depth)
    # Sparse table of argmin positions over depth.
    levels = max(1, length.bit_length())
    table = np.empty((levels, length), dtype=np.int64)
    table[0] = np.arange(length)
    span = 1
    for k in range(1, levels):
        prev = table[k - 1]
        nxt = prev.copy()
        lim = length - span
        left = prev[:lim]
        right = prev[span:span + lim]
        nxt[:lim] = np.where(depth[left] <= depth[right], left, right)
        table[k] = nxt
        span *= 2

    pos = np.empty(g.n, dtype=np.int64)
    for label, p in first.items():
        pos[label] = p
    u, v = g.endpoints
    lo = np.minimum(pos[u], pos[v])
    hi = np.maximum(pos[u], pos[v])
    width = hi - lo + 1
    k = np.floor(np.log2(width)).astype(np.int64)
    a = table[k, lo]
    b = table[k, hi - (1 << k) + 1]
    lca = np.where(depth[a] <= depth[b], a, b)
    return float(np.dot(g.weights, sizes[lca]))


def dasgupta_cost(g: WeightedGraph, tree: HcTree) -> float:
    """Exact cost of `tree` on `g`: sum over edges of weight * |lca subtree|."""
    _check_leaves(g, tree)
    if g.m == 0:
        return 0.0
    if g.n <= _SMALL_COST_N:
        return _cost_small(g, tree)
    return _cost_rmq(g, tree)


def cost_by_splits(g: WeightedGraph, tree: HcTree) -> float:
    """Cost re-expressed as sum over internal splits of w(S1, S2) * |node|.

    Equal to dasgupta_cost by construction; kept separate so tests can assert
    the equality on random instances.
    """
    _check_leaves(g, tree)
    u, v = g.endpoints
    total = 0.0
    for node in tree.internal_nodes():
        # crossing weight between the node's two child leaf sets
        mask = g.side_mask(node.left.leaves())
        nodeset = g.side_mask(node.leaves())
        inside = nodeset[u] & nodeset[v]
        crossing = mask[u] ^ mask[v]
        total += node.size * float(g.weights[inside & crossing].sum())
    return total


# -- recursive construction ----------------------------------------------

def make_tree(g: WeightedGraph, cut_fn: Callable[[WeightedGraph], "object"]) -> HcTree:
    """Build a tree by recursive splitting.

    `cut_fn` maps a graph with >= 2 vertices to an object with a `side`
    attribute (local vertex labels of one part).  Recursion is simulated with
    an explicit stack; labels are mapped back to the original ids.
    """
    if g.n == 1:
        return HcTree.leaf(0)

    # Each work item: (graph, original labels, parent node or None, is_left)
    root_holder: list[HcTree] = [None]  # type: ignore[list-item]
    work: list[tuple[WeightedGraph, np.ndarray, HcTree | None, bool]] = [
        (g, np.arange(g.n), None, False)
    ]

    def attach(parent: HcTree | None, is_left: bool, child: HcTree) -> None:
        if parent is None:
            root_holder[0] = child
        elif is_left:
            parent.left = child
        else:
            parent.right = child

    while work:
        h, labels, parent, is_left = work.pop()
        if h.n == 1:
            attach(parent, is_left, HcTree.leaf(int(labels[0])))
            continue
        cut = cut_fn(h)
        side = np.asarray(sorted(cut.side), dtype=np.int64)
        other = np.setdiff1d(np.arange(h.n), side, assume_unique=True)
        node = _hollow_node(h.n)
        attach(parent, is_left, node)
        sub_l, _ = h.induced_subgraph(side)
        sub_r, _ = h.induced_subgraph(other)
        work.append((sub_r, labels[other], node, False))
        work.append((sub_l, labels[side], node, True))

    # sizes were set eagerly from subgraph sizes; leaves carry size 1 already
    return root_holder[0]


# -- exact optimum by dynamic programming over subsets --------------------

def brute_force_optimal_tree(g: WeightedGraph) -> tuple[HcTree, float]:
    """Exact minimum Dasgupta cost and a witness tree (n <= 14).

    OPT(S) = min over proper bipartitions (A, S \\ A) of
             w(A, S \\ A) * |S| + OPT(A) + OPT(S \\ A).
    """
    n = g.n
    if n > OPTIMAL_TREE_MAX_N:
        raise TooLargeForOracleError(f"subset DP capped at n={OPTIMAL_TREE_MAX_N}, got {n}")
    full = (1 << n) - 1

    # row_w[v][T]: total weight from v into vertex set T
    wmat = np.zeros((n, n))
    for a, b, c in zip(*g.endpoints, g.weights):
        wmat[a, b] += c
        wmat[b, a] += c
    row_w = np.zeros((n, 1 << n))
    idx = np.arange(1 << n)
    for vtx in range(n):
        for other in range(n):
            if wmat[vtx, other]:
                row_w[vtx][(idx >> other) & 1 == 1] += wmat[vtx, other]

    # intra[S]: total weight of edges with both endpoints in S
    intra = np.zeros(1 << n)
    for s in range(1, (1 << n)):
        low = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        intra[s] = intra[rest] + row_w[low][rest]

    popcnt = [bin(s).count("1") for s in range(1 << n)]
    opt = [0.0] * (1 << n)
    choice = [0] * (1 << n)
    order = sorted(range(1, 1 << n), key=lambda s: popcnt[s])
    for s in order:
        if popcnt[s] < 2:
            continue
        low_bit = s & -s
        rest = s ^ low_bit
        size = popcnt[s]
        f_s = intra[s]
        best = np.inf
        best_a = 0
        # A ranges over submasks of s that exclude the lowest bit; the
        # complement (containing that bit) is the other part.
        a = rest
        while a:
            b = s ^ a
            cand = (f_s - intra[a] - intra[b]) * size + opt[a] + opt[b]
            if cand < best:
                best = cand
                best_a = a
            a = (a - 1) & rest
        opt[s] = best
        choice[s] = best_a

    def build(mask: int) -> HcTree:
        stack = [(mask, None, False)]
        holder: list[HcTree] = [None]  # type: ignore[list-item]
        while stack:
            s, parent, is_left = stack.pop()
            if popcnt[s] == 1:
                node = HcTree.leaf(s.bit_length() - 1)
            else:
                node = _hollow_node(popcnt[s])
                a = choice[s]
                stack.append((s ^ a, node, False))
                stack.append((a, node, True))
            if parent is None:
                holder[0] = node
            elif is_left:
                parent.left = node
            else:
                parent.right = node
        return holder[0]

    return build(full), float(opt[full])


# -- exhaustive enumeration ----------------------------------------------

def tree_count(n: int) -> int:
    """(2n-3)!! distinct leaf-labeled binary topologies."""
    count = 1
    for k in range(3, 2 * n - 2, 2):
        count *= k
    return count


def enumerate_all_trees(n: int) -> Iterator[HcTree]:
    """Every distinct leaf-labeled binary topology on 0..n-1, exactly once.

    Generated by inserting leaf k at each of the 2k-1 attachment points of
    every tree on 0..k-1; lazy, deterministic order.
    """
    if n > ENUMERATION_MAX_N:
        raise TooLargeForEnumerationError(
            f"tree enumeration capped at n={ENUMERATION_MAX_N}, got {n}"
        )
    if n < 1:
        raise TooLargeForEnumerationError("need at least one leaf")

    def insert_positions(tree: HcTree, new_label: int) -> Iterator[HcTree]:
        # Attach above each node; rebuild only the path to the root.
        def rebuild(path: list[tuple[HcTree, bool]], replacement: HcTree) -> HcTree:
            for parent, went_left in reversed(path):
                if went_left:
                    replacement = HcTree.node(replacement, parent.right)
                else:
                    replacement = HcTree.node(parent.left, replacement)
            return replacement

        stack: list[tuple[HcTree, list[tuple[HcTree, bool]]]] = [(tree, [])]
        while stack:
            node, path = stack.pop()
            yield rebuild(path, HcTree.node(node, HcTree.leaf(new_label)))
            if not node.is_leaf:
                stack.append((node.right, path + [(node, False)]))
                stack.append((node.left, path + [(node, True)]))

    def gen(k: int) -> Iterator[HcTree]:
        if k == 1:
            yield HcTree.leaf(0)
            return
        for smaller in gen(k - 1):
            yield from insert_positions(smaller, k - 1)

    return gen(n)


# -- serialization --------------------------------------------------------

def serialize_tree(tree: HcTree) -> str:
    """Nested-parenthesis text, e.g. '((0,1),(2,(3,4)))'; a leaf is its label."""
    parts: list[str] = []
    stack: list[object] = [tree]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
        elif item.is_leaf:
            parts.append(str(item.label))
        else:
            stack.extend([")", item.right, ",", item.left, "("])
    return "".join(parts)


def parse_tree(text: str) -> HcTree:
    """Inverse of serialize_tree; raises ParseError with the failing position."""
    s = text.strip()
    pos = 0
    n = len(s)

    def fail(msg: str):
        raise ParseError(f"position {pos}: {msg}")

    # Shunting-free recursive-descent with an explicit stack of partial nodes.
    stack: list[list] = []  # each entry: [left_subtree or None]
    current: HcTree | None = None
    while pos < n:
        ch = s[pos]
        if ch == "(":
            stack.append([None])
            pos += 1
        elif ch == ",":
            if not stack or current is None or stack[-1][0] is not None:
                fail("unexpected ','")
            stack[-1][0] = current
            current = None
            pos += 1
        elif ch == ")":
            if not stack or stack[-1][0] is None or current is None:
                fail("unexpected ')'")
            left = stack.pop()[0]
            current = HcTree.node(left, current)
            pos += 1
        elif ch.isdigit():
            start = pos
            while pos < n and s[pos].isdigit():
                pos += 1
            current = HcTree.leaf(int(s[start:pos]))
        else:
            fail(f"unexpected character {ch!r}")
    if stack:
        fail("unbalanced parentheses")
    if current is None:
        fail("empty input")
    labels = current.leaves()
    if len(set(labels)) != len(labels):
        raise ParseError("duplicate leaf label")
    return current


# -- sensitivity probe ----------------------------------------------------

def cost_sensitivity_check(
    g: WeightedGraph,
    delta: Mapping[tuple[int, int], float] | Sequence[tuple[int, int, float]],
    tree: HcTree,
) -> float:
    """|cost under w - cost under w + delta| for a fixed tree.

    `delta` maps unordered edge pairs (present in g) to weight changes; the
    perturbed weights must stay nonnegative.  The returned difference is at
    most n * ||delta||_1 for any tree, which tests assert.
    """
    if not isinstance(delta, Mapping):
        delta = {(min(a, b), max(a, b)): d for a, b, d in delta}
    u, v = g.endpoints
    new_w = g.weights.copy()
    index = {(int(a), int(b)): i for i, (a, b) in enumerate(zip(u, v))}
    for (a, b), d in delta.items():
        key = (min(a, b), max(a, b))
        if key not in index:
            raise LeafMismatchError(f"delta touches absent edge {key}")
        new_w[index[key]] += d
    if np.any(new_w < 0):
        raise NegativeResultingWeightError("perturbed weight fell below zero")
    base = dasgupta_cost(g, tree)
    shifted = dasgupta_cost(g.with_weights(new_w), tree)
    return abs(base - shifted)
