"""Command-line surface: generate instances, run algorithms, sweep epsilon
grids, benchmark scaling, and verify the package's checkable claims.

Results are CSV rows with columns
    graph_id, algorithm, epsilon, seed, cost, wall_time_ms, ledger_total
and reported costs are always evaluated on the original graph (the private
algorithms only ever saw the perturbed one).  DPHC_THREADS caps worker
parallelism for compare/bench; output row order is canonical regardless.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .algorithms import (
    HcAlgorithmConfig,
    blended_hc,
    exponential_mechanism_hc,
    hc_dp,
    input_perturbation_hc,
    linkage_hc,
    nonprivate_hc,
)
from .cuts import balanced_sparsest_cut, brute_force_balanced_sparsest_cut
from .errors import UnknownAlgorithmError
from .generators import (
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
    cost_sensitivity_check,
    dasgupta_cost,
    serialize_tree,
)
from .mechanisms import (
    EpsilonLedger,
    SeededRng,
    child_seed,
    private_cost_release,
    raw_perturbed_weights,
)
from .reduction import adaptive_reduction_hc

DEFAULT_EPS_GRID = (0.01, 0.1, 0.5, 1.0, 2.0)
CSV_HEADER = "graph_id,algorithm,epsilon,seed,cost,wall_time_ms,ledger_total"

ALGORITHMS = (
    "hc_dp",
    "input_perturbation",
    "linkage_single",
    "linkage_average",
    "linkage_complete",
    "expmech",
    "nonprivate",
    "blended",
)


@dataclass
class RunRecord:
    graph_id: str
    algorithm: str
    epsilon: float
    seed: int
    cost: float
    wall_time_ms: float
    ledger_total: float

    def csv_row(self) -> str:
        return (
            f"{self.graph_id},{self.algorithm},{self.epsilon:g},{self.seed},"
            f"{self.cost:.12g},{self.wall_time_ms:.3f},{self.ledger_total:.12g}"
        )


def run_algorithm(
    g: WeightedGraph,
    algorithm: str,
    epsilon: float,
    seed: int,
    gamma: float = 1 / 3,
    overlay_c: float = 10.0,
    restarts: int = 4,
) -> tuple[HcTree, EpsilonLedger]:
    """One trial of a named algorithm; returns the tree and its charge ledger."""
    if algorithm not in ALGORITHMS:
        raise UnknownAlgorithmError(f"unknown algorithm {algorithm!r}")
    ledger = EpsilonLedger(budget=epsilon if algorithm != "nonprivate" else 0.0)
    cfg = HcAlgorithmConfig(
        epsilon=epsilon if algorithm != "nonprivate" else 1.0,
        overlay_c=overlay_c,
        gamma=gamma,
        restarts=restarts,
        seed=seed,
    )
    if algorithm == "hc_dp":
        tree = hc_dp(g, cfg, ledger)
    elif algorithm == "input_perturbation":
        tree = input_perturbation_hc(g, cfg, ledger)
    elif algorithm.startswith("linkage_"):
        tree = linkage_hc(g, cfg, algorithm.removeprefix("linkage_"), ledger)
    elif algorithm == "expmech":
        tree = exponential_mechanism_hc(g, epsilon, SeededRng(seed), ledger)
    elif algorithm == "blended":
        tree = blended_hc(g, epsilon, SeededRng(seed), ledger)
    else:
        tree = nonprivate_hc(g, cfg)
    return tree, ledger


def run_one(
    g: WeightedGraph,
    graph_id: str,
    algorithm: str,
    epsilon: float,
    seed: int,
    private_eval: bool = False,
    **kwargs,
) -> tuple[RunRecord, HcTree]:
    start = time.perf_counter()
    tree, ledger = run_algorithm(g, algorithm, epsilon, seed, **kwargs)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    if private_eval:
        # charges additional budget on top of the run itself
        cost = private_cost_release(g, tree, epsilon, SeededRng(child_seed(seed, 1)), ledger)
    else:
        cost = dasgupta_cost(g, tree)
    record = RunRecord(
        graph_id=graph_id,
        algorithm=algorithm,
        epsilon=epsilon if algorithm != "nonprivate" else 0.0,
        seed=seed,
        cost=cost,
        wall_time_ms=elapsed_ms,
        ledger_total=ledger.total(),
    )
    return record, tree


# -- generate -----------------------------------------------------------------

def _parse_sizes(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def cmd_generate(args) -> int:
    rng = SeededRng(args.seed)
    if args.kind == "sbm":
        g = gen_sbm(_parse_sizes(args.sizes), args.p, args.q, args.wmin, args.wmax, rng)
    elif args.kind == "hsbm":
        g = gen_hsbm(
            _parse_sizes(args.sizes), args.p, args.q_sibling, args.q_far,
            args.wmin, args.wmax, rng,
        )
    elif args.kind == "kernel":
        feats = load_features(args.features, skip_header=args.skip_header)
        g = kernel_graph(feats, args.sigma, args.tau, rescale_to_unit=args.rescale)
    elif args.kind == "cycles5":
        g = gen_random_5cycles(args.n, rng)
    else:  # hard
        g = gen_hard_instance(args.n, args.eps, rng).graph
    write_graph(g, args.out)
    min_w = f"{g.min_weight():.12g}" if g.m else "n/a"
    print(f"n={g.n} m={g.m} min_weight={min_w} -> {args.out}")
    return 0


# -- run ------------------------------------------------------------------------

def cmd_run(args) -> int:
    g = read_graph(args.graph)
    record, tree = run_one(
        g,
        Path(args.graph).stem,
        args.alg,
        args.eps,
        args.seed,
        private_eval=args.private_eval,
        gamma=args.gamma,
        overlay_c=args.overlay_c,
        restarts=args.restarts,
    )
    print(CSV_HEADER)
    print(record.csv_row())
    if args.emit_tree:
        print(serialize_tree(tree))
    return 0


# -- compare ---------------------------------------------------------------------

def _max_workers() -> int:
    env = os.environ.get("DPHC_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def cmd_compare(args) -> int:
    rng_master = args.seed
    graphs: list[tuple[str, WeightedGraph]] = []
    if args.graphs:
        for path in args.graphs:
            graphs.append((Path(path).stem, read_graph(path)))
    else:
        sizes = _parse_sizes(args.sizes)
        for i in range(args.num_graphs):
            grng = SeededRng(child_seed(rng_master, f"graph:{i}"))
            if args.kind == "hsbm":
                g = gen_hsbm(sizes, args.p, args.q_sibling, args.q_far,
                             args.wmin, args.wmax, grng)
            else:
                g = gen_sbm(sizes, args.p, args.q, args.wmin, args.wmax, grng)
            graphs.append((f"{args.kind}-{i:03d}", g))

    algorithms = [a for a in args.algs.split(",") if a]
    eps_grid = [float(x) for x in args.eps_grid.split(",") if x]
    jobs = []
    for graph_id, g in graphs:
        for alg in algorithms:
            grid = [0.0] if alg == "nonprivate" else eps_grid
            for eps in grid:
                for trial in range(args.trials):
                    seed = child_seed(rng_master, f"run:{graph_id}:{alg}:{eps:g}:{trial}")
                    jobs.append((g, graph_id, alg, max(eps, 1.0), eps, trial, seed))

    def execute(job):
        g, graph_id, alg, run_eps, label_eps, trial, seed = job
        record, _ = run_one(g, graph_id, alg, run_eps, seed)
        record.epsilon = label_eps
        return record

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        records = list(pool.map(execute, jobs))

    records.sort(key=lambda r: (r.graph_id, r.algorithm, r.epsilon, r.seed))
    lines = [CSV_HEADER] + [r.csv_row() for r in records]

    # aggregate rows per (algorithm, epsilon) cell across graphs and trials
    cells: dict[tuple[str, float], list[RunRecord]] = {}
    for r in records:
        cells.setdefault((r.algorithm, r.epsilon), []).append(r)
    for (alg, eps), rs in sorted(cells.items()):
        costs = [r.cost for r in rs]
        times = [r.wall_time_ms for r in rs]
        led = [r.ledger_total for r in rs]
        for stat, fn in (("mean", np.mean), ("min", np.min), ("max", np.max)):
            lines.append(
                f"ALL,{alg},{eps:g},{stat},{fn(costs):.12g},{fn(times):.3f},{fn(led):.12g}"
            )

    out = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(out)
        print(f"wrote {len(records)} rows (+aggregates) to {args.out}")
    else:
        sys.stdout.write(out)
    if args.svg:
        _write_compare_svg(records, args.svg)
        print(f"wrote chart to {args.svg}")
    return 0


def _write_compare_svg(records, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cells: dict[tuple[str, float], list[float]] = {}
    for r in records:
        cells.setdefault((r.algorithm, r.epsilon), []).append(r.cost)
    algs = sorted({a for a, _ in cells})
    eps_vals = sorted({e for _, e in cells})
    width = 0.8 / max(1, len(algs))
    fig, ax = plt.subplots(figsize=(8, 4))
    xs = np.arange(len(eps_vals))
    for i, alg in enumerate(algs):
        means = [np.mean(cells.get((alg, e), [np.nan])) for e in eps_vals]
        ax.bar(xs + i * width, means, width, label=alg)
    ax.set_xticks(xs + 0.4 - width / 2)
    ax.set_xticklabels([f"{e:g}" for e in eps_vals])
    ax.set_xlabel("epsilon")
    ax.set_ylabel("mean cost")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


# -- bench ------------------------------------------------------------------------

def _five_cluster_sizes(n: int) -> list[int]:
    base = n // 5
    sizes = [base] * 5
    for i in range(n - 5 * base):
        sizes[i] += 1
    return sizes


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    lines = [CSV_HEADER]
    for n in sizes:
        grng = SeededRng(child_seed(args.seed, f"bench:{n}"))
        g = gen_sbm(_five_cluster_sizes(n), args.p, args.q, args.wmin, args.wmax, grng)
        seed = child_seed(args.seed, f"bench-run:{n}")
        record, _ = run_one(g, f"sbm-n{n}", args.alg, args.eps, seed)
        lines.append(record.csv_row())
        print(record.csv_row())
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


# -- verify -------------------------------------------------------------------------

def _report(name: str, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


def verify_peel(n: int, eps: float, seed: int = 0) -> bool:
    hard = gen_hard_instance(n, eps, SeededRng(seed))
    tree = peel_tree(hard)
    cost = dasgupta_cost(hard.graph, tree)
    bound = (19 * n / 5) * hard.heavy_weight + 0.5
    ok = cost <= bound + 1e-9
    detail = f"n={n} eps={eps:g} peel_cost={cost:.6g} bound={bound:.6g}"
    if n <= 12:
        _, opt = brute_force_optimal_tree(hard.graph)
        ok = ok and cost >= opt - 1e-9
        detail += f" opt={opt:.6g}"
    return _report("peel", ok, detail)


def verify_sensitivity(n: int, trials: int, seed: int = 0) -> bool:
    rng = SeededRng(seed)
    worst = 0.0
    for _ in range(trials):
        size = int(rng.integers(2, n + 1))
        g, tree = _random_graph_and_tree(size, rng)
        if g.m == 0:
            continue
        delta = _random_delta(g, rng)
        diff = cost_sensitivity_check(g, delta, tree)
        bound = size * sum(abs(d) for d in delta.values())
        worst = max(worst, diff - bound)
        if diff > bound + 1e-9:
            return _report("sensitivity", False, f"violation: diff={diff} bound={bound}")
    return _report("sensitivity", True, f"{trials} trials, max slack violation {worst:.3g}")


def _random_graph_and_tree(n: int, rng: SeededRng):
    u, v = np.triu_indices(n, k=1)
    present = rng.random(len(u)) < 0.6
    w = rng.uniform(1.0, 10.0, size=int(present.sum()))
    g = new_graph(n, list(zip(u[present], v[present], w)))
    order = [int(x) for x in rng.permutation(n)]
    tree = HcTree.leaf(order[0])
    for label in order[1:]:
        tree = HcTree.node(tree, HcTree.leaf(label))
    return g, tree


def _random_delta(g: WeightedGraph, rng: SeededRng) -> dict[tuple[int, int], float]:
    m = g.m
    k = int(rng.integers(1, min(m, 4) + 1))
    picks = rng.choice(m, size=k, replace=False)
    raw = rng.random(k) - 0.5
    scale = 1.0 / max(1e-12, np.abs(raw).sum())
    u, v = g.endpoints
    delta = {}
    for idx, r in zip(picks, raw):
        a, b = int(u[idx]), int(v[idx])
        change = float(r * scale)
        change = max(change, -float(g.weights[idx]))  # keep weights nonnegative
        delta[(a, b)] = change
    return delta


def verify_ledger(n: int, eps: float, trials: int, seed: int = 0) -> bool:
    worst = 0.0
    for t in range(trials):
        rng = SeededRng(child_seed(seed, t))
        g = gen_sbm(_five_cluster_sizes(n), 0.7, 0.1, 1.0, 10.0, rng)
        _, ledger = adaptive_reduction_hc(g, eps, rng=rng.child(1))
        worst = max(worst, ledger.total())
        if ledger.total() > eps + 1e-9:
            return _report("ledger", False, f"trial {t}: total {ledger.total():.6g} > {eps}")
    return _report("ledger", True, f"{trials} runs at n={n}, max total {worst:.6g} <= eps={eps:g}")


def verify_positive_weights(n: int = 50, eps: float = 0.5, trials: int = 1000, seed: int = 0) -> bool:
    u, v = np.triu_indices(n, k=1)
    g = new_graph(n, [(int(a), int(b), 1.0) for a, b in zip(u, v)])
    rng = SeededRng(seed)
    bad = 0
    for _ in range(trials):
        raw = raw_perturbed_weights(g, eps, 10.0, rng)
        if np.any(raw < 0):
            bad += 1
    frac = bad / trials
    return _report(
        "positive-weights", frac <= 0.005, f"K{n} eps={eps:g}: negative pre-clamp rate {frac:.4g}"
    )


def verify_oracle(graphs: int = 50, seed: int = 0) -> bool:
    rng = SeededRng(seed)
    checked = 0
    for i in range(graphs):
        n = int(rng.integers(4, 13))
        u, v = np.triu_indices(n, k=1)
        present = rng.random(len(u)) < 0.5
        edges = [(int(a), int(b), 1.0) for a, b in zip(u[present], v[present])]
        if not edges:
            continue
        g = new_graph(n, edges)
        oracle = brute_force_balanced_sparsest_cut(g)
        heur = balanced_sparsest_cut(g, rng=rng.child(i))
        if heur.expansion < oracle.expansion - 1e-9:
            return _report("oracle", False, f"heuristic beat oracle on graph {i}")
        if g.is_connected() and heur.expansion > 3.0 * oracle.expansion + 1e-9:
            return _report(
                "oracle", False,
                f"quality gate: {heur.expansion:.4g} > 3x oracle {oracle.expansion:.4g}",
            )
        checked += 1
    return _report("oracle", True, f"{checked} random graphs within the quality gate")


def cmd_verify(args) -> int:
    results = []
    if args.suite in ("peel", "all"):
        results.append(verify_peel(args.n or 10, args.eps or 0.04, args.seed))
    if args.suite in ("sensitivity", "all"):
        results.append(verify_sensitivity(args.n or 10, args.trials or 200, args.seed))
    if args.suite in ("ledger", "all"):
        results.append(verify_ledger(args.n or 64, args.eps or 1.0, args.trials or 50, args.seed))
    if args.suite in ("positive-weights", "all"):
        results.append(
            verify_positive_weights(args.n or 50, args.eps or 0.5, args.trials or 1000, args.seed)
        )
    if args.suite in ("oracle", "all"):
        results.append(verify_oracle(args.trials or 50, args.seed))
    return 0 if all(results) else 1


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dphc", description="Weight-private hierarchical clustering toolkit"
    )
    parser.add_argument("--version", action="version", version=f"dphc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a graph instance to an edge-list file")
    p_gen.add_argument("kind", choices=["sbm", "hsbm", "kernel", "cycles5", "hard"])
    p_gen.add_argument("--sizes", default="20,20,30,30,50", help="cluster sizes, comma-separated")
    p_gen.add_argument("--p", type=float, default=0.7)
    p_gen.add_argument("--q", type=float, default=0.1)
    p_gen.add_argument("--q-sibling", type=float, default=0.3)
    p_gen.add_argument("--q-far", type=float, default=0.1)
    p_gen.add_argument("--wmin", type=float, default=1.0)
    p_gen.add_argument("--wmax", type=float, default=10.0)
    p_gen.add_argument("--n", type=int, default=10)
    p_gen.add_argument("--eps", type=float, default=0.04)
    p_gen.add_argument("--features", help="feature CSV for kernel graphs")
    p_gen.add_argument("--skip-header", action="store_true")
    p_gen.add_argument("--sigma", type=float, default=1.0)
    p_gen.add_argument("--tau", type=float, default=1e-3)
    p_gen.add_argument("--rescale", action="store_true", help="rescale min kept weight to 1")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("-o", "--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_run = sub.add_parser("run", help="one algorithm trial on a graph file")
    p_run.add_argument("graph")
    p_run.add_argument("--alg", required=True, choices=ALGORITHMS)
    p_run.add_argument("--eps", type=float, default=1.0)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--gamma", type=float, default=1 / 3)
    p_run.add_argument("--overlay-c", type=float, default=10.0)
    p_run.add_argument("--restarts", type=int, default=4)
    p_run.add_argument("--emit-tree", action="store_true")
    p_run.add_argument(
        "--private-eval", action="store_true",
        help="report a privately released cost (charges extra budget)",
    )
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="algorithm x epsilon x trial factorial")
    p_cmp.add_argument("--graphs", nargs="*", help="edge-list files (overrides generation)")
    p_cmp.add_argument("--kind", choices=["sbm", "hsbm"], default="sbm")
    p_cmp.add_argument("--num-graphs", type=int, default=10)
    p_cmp.add_argument("--sizes", default="20,20,30,30,50")
    p_cmp.add_argument("--p", type=float, default=0.7)
    p_cmp.add_argument("--q", type=float, default=0.1)
    p_cmp.add_argument("--q-sibling", type=float, default=0.3)
    p_cmp.add_argument("--q-far", type=float, default=0.1)
    p_cmp.add_argument("--wmin", type=float, default=1.0)
    p_cmp.add_argument("--wmax", type=float, default=10.0)
    p_cmp.add_argument("--algs", default="hc_dp,input_perturbation,nonprivate")
    p_cmp.add_argument("--eps-grid", default="0.01,0.1,0.5,1,2")
    p_cmp.add_argument("--trials", type=int, default=5)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("-o", "--out")
    p_cmp.add_argument("--svg", help="optional bar chart of mean costs")
    p_cmp.set_defaults(func=cmd_compare)

    p_bench = sub.add_parser("bench", help="runtime scaling over graph sizes")
    p_bench.add_argument("--sizes", default="100,200,400,800,1500")
    p_bench.add_argument("--alg", default="hc_dp", choices=ALGORITHMS)
    p_bench.add_argument("--eps", type=float, default=0.5)
    p_bench.add_argument("--p", type=float, default=0.7)
    p_bench.add_argument("--q", type=float, default=0.1)
    p_bench.add_argument("--wmin", type=float, default=1.0)
    p_bench.add_argument("--wmax", type=float, default=10.0)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("-o", "--out")
    p_bench.set_defaults(func=cmd_bench)

    p_ver = sub.add_parser("verify", help="run checkable claims and report pass/fail")
    p_ver.add_argument(
        "suite",
        choices=["peel", "sensitivity", "ledger", "positive-weights", "oracle", "all"],
    )
    p_ver.add_argument("--n", type=int)
    p_ver.add_argument("--eps", type=float)
    p_ver.add_argument("--trials", type=int)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
