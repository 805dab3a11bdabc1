"""Noise mechanisms, input perturbation, private releases, and budget accounting.

All randomness flows through SeededRng (PCG64 under the hood) so that a fixed
seed reproduces every byte of output.  A noise-disabled mode replaces draws by
zero for deterministic contract tests; it is never a default and carries no
privacy guarantee.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyCandidateListError,
    NonPositiveDeltaPrimeError,
    NonPositiveEpsilonError,
    NonPositiveScaleError,
    NonPositiveSensitivityError,
)
from .graph import WeightedGraph
from .hctree import HcTree, dasgupta_cost


def child_seed(master_seed: int, index: int) -> int:
    """Stable 64-bit child seed: platform-independent hash of (master, index)."""
    payload = f"dphc:{master_seed}:{index}".encode("ascii")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")


class SeededRng:
    """Deterministic random stream; same seed gives an identical sample stream.

    Backed by numpy's PCG64.  Parallel work derives independent children with
    child(); each child is owned by exactly one thread of execution.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def random(self, size=None):
        return self._gen.random(size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size=size)

    def choice(self, a, size=None, replace=True):
        return self._gen.choice(a, size=size, replace=replace)

    def permutation(self, x):
        return self._gen.permutation(x)

    def uniform(self, low, high, size=None):
        return self._gen.uniform(low, high, size=size)

    def child(self, index: int) -> "SeededRng":
        return SeededRng(child_seed(self.seed, index))


@dataclass
class LedgerEntry:
    label: str
    epsilon: float
    level: int | None = None
    subgraph_size: int | None = None


@dataclass
class EpsilonLedger:
    """Append-only record of privacy charges; advisory, never gates execution."""

    budget: float | None = None
    entries: list[LedgerEntry] = field(default_factory=list)

    def charge(self, label: str, epsilon: float, level=None, subgraph_size=None) -> None:
        if epsilon <= 0:
            raise NonPositiveEpsilonError("charges must be positive")
        self.entries.append(LedgerEntry(label, float(epsilon), level, subgraph_size))

    def total(self) -> float:
        return float(sum(e.epsilon for e in self.entries))

    def within_budget(self) -> bool:
        return self.budget is None or self.total() <= self.budget + 1e-12

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["level", "subgraph_size", "epsilon_charge"])
            for e in self.entries:
                writer.writerow([e.level, e.subgraph_size, f"{e.epsilon:.12g}"])


# -- sampling ---------------------------------------------------------------

def sample_laplace(rng: SeededRng, b: float, size=None, noise_disabled: bool = False):
    """Laplace(0, b) draw by inverse CDF: -b*sign(u-1/2)*ln(1-2|u-1/2|)."""
    if b <= 0:
        raise NonPositiveScaleError("Laplace scale must be positive")
    if noise_disabled:
        return 0.0 if size is None else np.zeros(size)
    if rng is None:
        raise ValueError("an rng is required unless noise is disabled")
    u = rng.random(size)
    shifted = u - 0.5
    return -b * np.sign(shifted) * np.log1p(-2.0 * np.abs(shifted))


# -- input perturbation -------------------------------------------------------

def raw_perturbed_weights(
    g: WeightedGraph,
    epsilon: float,
    overlay_c: float = 10.0,
    rng: SeededRng | None = None,
    noise_disabled: bool = False,
) -> np.ndarray:
    """Pre-clamp perturbed weights: w + overlay_c*ln(n)/eps + Lap(1/eps).

    Exposed for diagnostics (the positives-check uses the pre-clamp values);
    perturb_graph applies the clamp.
    """
    if epsilon <= 0:
        raise NonPositiveEpsilonError("epsilon must be positive")
    if g.m < 1:
        raise ValueError("perturbation needs at least one edge")
    shift = overlay_c * math.log(g.n) / epsilon if overlay_c else 0.0
    noise = sample_laplace(rng, 1.0 / epsilon, size=g.m, noise_disabled=noise_disabled)
    return g.weights + shift + noise


def perturb_graph(
    g: WeightedGraph,
    epsilon: float,
    rng: SeededRng | None = None,
    overlay_c: float = 10.0,
    ledger: EpsilonLedger | None = None,
    noise_disabled: bool = False,
) -> WeightedGraph:
    """Overlay-and-noise input perturbation; topology is unchanged.

    Each weight becomes max(0, w + overlay_c*ln(n)/eps + Lap(1/eps)).  Negative
    outcomes are clamped to zero (post-processing, so privacy is unaffected)
    which keeps downstream solvers' nonnegativity precondition unconditional.
    Charges eps to the ledger once.
    """
    raw = raw_perturbed_weights(g, epsilon, overlay_c, rng, noise_disabled)
    if ledger is not None:
        ledger.charge("perturb_graph", epsilon)
    return g.with_weights(np.maximum(raw, 0.0))


def perturb_graph_plain(
    g: WeightedGraph,
    epsilon: float,
    rng: SeededRng | None = None,
    ledger: EpsilonLedger | None = None,
    noise_disabled: bool = False,
) -> WeightedGraph:
    """Plain input perturbation: Lap(1/eps) on each weight, no overlay, clamped."""
    raw = raw_perturbed_weights(g, epsilon, 0.0, rng, noise_disabled)
    if ledger is not None:
        ledger.charge("perturb_graph_plain", epsilon)
    return g.with_weights(np.maximum(raw, 0.0))


# -- scalar releases ----------------------------------------------------------

def private_scalar(
    value: float,
    sensitivity: float,
    epsilon: float,
    rng: SeededRng | None = None,
    ledger: EpsilonLedger | None = None,
    noise_disabled: bool = False,
) -> float:
    """Laplace mechanism for one number: value + Lap(sensitivity/eps)."""
    if sensitivity <= 0:
        raise NonPositiveSensitivityError("sensitivity must be positive")
    if epsilon <= 0:
        raise NonPositiveEpsilonError("epsilon must be positive")
    noise = sample_laplace(rng, sensitivity / epsilon, noise_disabled=noise_disabled)
    if ledger is not None:
        ledger.charge("private_scalar", epsilon)
    return float(value) + float(noise)


def private_cost_release(
    g: WeightedGraph,
    tree: HcTree,
    epsilon: float,
    rng: SeededRng | None = None,
    ledger: EpsilonLedger | None = None,
    noise_disabled: bool = False,
) -> float:
    """One-sided private estimate of a tree's cost.

    Returns cost + 10*n*ln(n)/eps + Lap(n/eps).  The deterministic shift makes
    the estimate an upper bound of the true cost except with probability
    n^-10 / 2 per release; the weight-neighboring sensitivity of the cost is n.
    Charges eps.
    """
    if epsilon <= 0:
        raise NonPositiveEpsilonError("epsilon must be positive")
    cost = dasgupta_cost(g, tree)
    n = g.n
    shift = 10.0 * n * math.log(n) / epsilon
    noise = sample_laplace(rng, n / epsilon, noise_disabled=noise_disabled)
    if ledger is not None:
        ledger.charge("private_cost_release", epsilon)
    return cost + shift + float(noise)


def private_select_best(
    g: WeightedGraph,
    candidates: list[HcTree],
    epsilon: float,
    rng: SeededRng | None = None,
    ledger: EpsilonLedger | None = None,
    noise_disabled: bool = False,
) -> HcTree:
    """Return the candidate whose private cost release is smallest.

    Splits eps evenly: each of the k candidates is evaluated with eps/k, so the
    total charge is eps.  Ties keep the earliest candidate.
    """
    if epsilon <= 0:
        raise NonPositiveEpsilonError("epsilon must be positive")
    k = len(candidates)
    if k == 0:
        raise EmptyCandidateListError("need at least one candidate tree")
    best_tree = candidates[0]
    best_release = math.inf
    for tree in candidates:
        release = private_cost_release(g, tree, epsilon / k, rng, ledger, noise_disabled)
        if release < best_release:
            best_release = release
            best_tree = tree
    return best_tree


# -- composition calculators ----------------------------------------------------

def compose_basic(charges) -> float:
    """Basic sequential composition: the budgets simply add."""
    total = 0.0
    for c in charges:
        if c <= 0:
            raise NonPositiveEpsilonError("charges must be positive")
        total += float(c)
    return total


def compose_strong(k: int, epsilon: float, delta_prime: float) -> float:
    """Advanced composition bound sqrt(2k ln(1/d'))*eps + k*eps*(e^eps - 1).

    Calculator only; budget splitting in this package always uses basic
    composition.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 0.0
    if epsilon <= 0:
        raise NonPositiveEpsilonError("epsilon must be positive")
    if delta_prime <= 0:
        raise NonPositiveDeltaPrimeError("delta' must be positive")
    return math.sqrt(2.0 * k * math.log(1.0 / delta_prime)) * epsilon + k * epsilon * (
        math.exp(epsilon) - 1.0
    )
