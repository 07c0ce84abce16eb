"""Benchmark the compiled kernels against their pure-Python twins.

Each kernel runs the same workload on both backends; outputs are asserted
equal before any timing is reported, so a speedup claim can never hide a
semantic drift.

Usage: python benchmarks/bench_backends.py [--repeats N] [--scale S]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from icsource import (
    RandomGraphParams,
    WeightedDigraph,
    candidate_set,
    convert_self_loops,
    generate_random_graph,
    simulate_ic,
)
from icsource import _kernels_py as pure
from icsource.rng import keyed_u64_array
from icsource.stationary import _walk_csr

try:
    from icsource import _kernels_c as compiled
except ImportError:
    compiled = None


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _equal(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def build_workloads(scale: float):
    g = generate_random_graph(RandomGraphParams(n=500, density=0.0416, p_range=0.1, seed=7))
    cascade = simulate_ic(g, source=11, seed=40)
    while len(cascade.active) < 40:  # a cascade big enough to exercise detection
        cascade = simulate_ic(g, source=11, seed=cascade.num_rounds + len(cascade.active))
    cs = candidate_set(g, cascade.active)
    sub = cs.graph
    mc = convert_self_loops(sub)
    indptr, indices, cum = _walk_csr(mc)

    n_sizes = max(1, int(400 * scale))
    sources = (np.arange(n_sizes, dtype=np.int64) * 13) % g.n
    seeds = keyed_u64_array(5, sources.astype(np.uint64), np.arange(n_sizes, dtype=np.uint64))

    small = generate_random_graph(RandomGraphParams(n=6, density=0.55, p_range=0.9, seed=3))
    while small.num_edges > 17:
        keep = np.arange(small.num_edges) != small.num_edges - 1
        small = WeightedDigraph(small.n, small.src[keep], small.dst[keep], small.p[keep])

    walk_steps = max(1, int(100_000 * scale))
    return [
        (
            "ic_cascade (n=500, 100 runs)",
            lambda k: [k.ic_cascade(g.out_ptr, g.dst, g.p, s % g.n, s) for s in range(100)],
        ),
        (
            f"cascade_sizes ({n_sizes} runs)",
            lambda k: k.cascade_sizes(g.out_ptr, g.dst, g.p, sources, seeds),
        ),
        (
            f"walk_visits ({sub.n} states, {walk_steps} steps)",
            lambda k: k.walk_visits(indptr, indices, cum, walk_steps, 12),
        ),
        (
            f"arborescence_log_weights (n={sub.n}, m={sub.num_edges})",
            lambda k: k.arborescence_log_weights(sub.n, sub.src, sub.dst, np.log(sub.p)),
        ),
        (
            f"subset_source_probability (n={small.n}, m={small.num_edges})",
            lambda k: k.subset_source_probability(small.n, small.src, small.dst, small.p),
        ),
    ]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3, help="timing repeats (best-of)")
    ap.add_argument("--scale", type=float, default=1.0,
                    help="workload scale factor (shrink for quick checks)")
    args = ap.parse_args()

    if compiled is None:
        print("compiled kernels not installed; nothing to compare")
        return 0

    print(f"{'kernel':48s} {'pure':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, work in build_workloads(args.scale):
        out_p = work(pure)
        out_c = work(compiled)
        assert _equal(out_p, out_c), f"backend outputs differ for {name}"
        t_p = _time(lambda: work(pure), args.repeats)
        t_c = _time(lambda: work(compiled), args.repeats)
        print(f"{name:48s} {t_p*1e3:9.1f}ms {t_c*1e3:9.1f}ms {t_p/t_c:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
