"""Pure-Python reference kernels.

Each function here has a compiled twin in ``_kernels_c`` (built from
``_kernels.pyx``) with identical semantics; the backend-parity tests hold the
two implementations together.  Keep the control flow of the twins in lock
step when editing either.
"""
from __future__ import annotations

from bisect import bisect_right

import numpy as np

from .rng import mix64, _GOLDEN, _MASK, _SEED_OFFSET

_INV_2_53 = 2.0**-53


def _attempt_base(seed: int) -> int:
    return mix64((seed + _SEED_OFFSET) & _MASK)


def _attempt_u01(base: int, rnd: int, parent: int, child: int) -> float:
    h = mix64(base ^ rnd)
    h = mix64(h ^ parent)
    h = mix64(h ^ child)
    return (h >> 11) * _INV_2_53


def ic_cascade(out_ptr, out_dst, out_p, source: int, seed: int):
    """Run one independent-cascade diffusion; returns (parents, round_of).

    ``parents[v]`` is -2 for inactive nodes, -1 for the source, else the
    activating parent; ``round_of[v]`` is -1 for inactive nodes, else the
    round in which v became active (0 for the source).

    Each node active in round t-1 makes one Bernoulli(p) attempt in round t on
    each out-neighbor not yet active at the attempt; the draw is keyed by
    (seed, t, parent, child), so results do not depend on iteration order.
    """
    n = len(out_ptr) - 1
    parents = np.full(n, -2, dtype=np.int64)
    round_of = np.full(n, -1, dtype=np.int64)
    parents[source] = -1
    round_of[source] = 0
    base = _attempt_base(seed)
    frontier = [source]
    t = 0
    while frontier:
        t += 1
        found: list[int] = []
        for i in frontier:
            for k in range(out_ptr[i], out_ptr[i + 1]):
                j = int(out_dst[k])
                if round_of[j] >= 0:
                    continue
                if _attempt_u01(base, t, i, j) < out_p[k]:
                    round_of[j] = t
                    parents[j] = i
                    found.append(j)
        found.sort()
        frontier = found
    return parents, round_of


def cascade_sizes(out_ptr, out_dst, out_p, sources, seeds):
    """Final active-set sizes for a batch of (source, seed) cascades."""
    n = len(out_ptr) - 1
    out = np.empty(len(sources), dtype=np.int64)
    stamp = np.full(n, -1, dtype=np.int64)
    for b in range(len(sources)):
        source = int(sources[b])
        base = _attempt_base(int(seeds[b]))
        stamp[source] = b
        size = 1
        frontier = [source]
        t = 0
        while frontier:
            t += 1
            found: list[int] = []
            for i in frontier:
                for k in range(out_ptr[i], out_ptr[i + 1]):
                    j = int(out_dst[k])
                    if stamp[j] == b:
                        continue
                    if _attempt_u01(base, t, i, j) < out_p[k]:
                        stamp[j] = b
                        found.append(j)
            size += len(found)
            frontier = found
        out[b] = size
    return out


def walk_visits(indptr, indices, cumvals, steps: int, seed: int):
    """Visit counts of one random walk of ``steps`` transitions.

    The start state is uniform (first stream draw); counts include it, so
    they sum to ``steps + 1``.  Transition rows are CSR slices of cumulative
    probabilities whose final entry is exactly 1.0; each step picks the first
    index whose cumulative value exceeds the draw.
    """
    k = len(indptr) - 1
    visits = np.zeros(k, dtype=np.int64)
    cum_rows = [list(cumvals[indptr[i] : indptr[i + 1]]) for i in range(k)]
    idx_rows = [list(indices[indptr[i] : indptr[i + 1]]) for i in range(k)]
    state = seed & _MASK
    state = (state + _GOLDEN) & _MASK
    u = (mix64(state) >> 11) * _INV_2_53
    cur = min(int(u * k), k - 1)
    visits[cur] += 1
    for _ in range(steps):
        state = (state + _GOLDEN) & _MASK
        u = (mix64(state) >> 11) * _INV_2_53
        row = cum_rows[cur]
        pos = bisect_right(row, u)
        if pos >= len(row):
            pos = len(row) - 1
        cur = idx_rows[cur][pos]
        visits[cur] += 1
    return visits


def arborescence_log_weights(n: int, esrc, edst, elogw):
    """Per-root log-weight of the maximum-weight spanning arborescence.

    Runs the weight-only Chu-Liu/Edmonds contraction once per root on costs
    ``-log w`` (minimising total cost maximises the weight product).  Roots
    with no spanning arborescence get ``-inf``.
    """
    src0 = [int(x) for x in esrc]
    dst0 = [int(x) for x in edst]
    cost0 = [-float(w) for w in elogw]
    out = np.empty(n, dtype=np.float64)
    for root in range(n):
        c = _min_cost_arborescence(n, src0, dst0, cost0, root)
        out[root] = -c if c != np.inf else -np.inf
    return out


def _min_cost_arborescence(n: int, src, dst, cost, root: int) -> float:
    INF = float("inf")
    src, dst, cost = list(src), list(dst), list(cost)
    total = 0.0
    while True:
        in_w = [INF] * n
        in_u = [-1] * n
        for kk in range(len(src)):
            v = dst[kk]
            if v != root and cost[kk] < in_w[v]:
                in_w[v] = cost[kk]
                in_u[v] = src[kk]
        for v in range(n):
            if v != root and in_w[v] == INF:
                return INF
            if v != root:
                total += in_w[v]
        # find cycles in the chosen in-edge pointers
        comp = [-1] * n
        vis = [-1] * n
        ncomp = 0
        for s in range(n):
            v = s
            while v != root and vis[v] == -1:
                vis[v] = s
                v = in_u[v]
            if v != root and vis[v] == s and comp[v] == -1:
                comp[v] = ncomp
                u = in_u[v]
                while u != v:
                    comp[u] = ncomp
                    u = in_u[u]
                ncomp += 1
        if ncomp == 0:
            return total
        for v in range(n):
            if comp[v] == -1:
                comp[v] = ncomp
                ncomp += 1
        # contract: every surviving edge's cost drops by the chosen in-cost of
        # its original head, which cancels the tentative commitment above
        nsrc: list[int] = []
        ndst: list[int] = []
        ncost: list[float] = []
        for kk in range(len(src)):
            cu, cv = comp[src[kk]], comp[dst[kk]]
            if cu != cv:
                nsrc.append(cu)
                ndst.append(cv)
                ncost.append(cost[kk] - in_w[dst[kk]])
        src, dst, cost = nsrc, ndst, ncost
        root = comp[root]
        n = ncomp


def subset_source_probability(n: int, esrc, edst, p):
    """For each node i, the total probability of edge subsets where i reaches all.

    Sums ``p(X) = prod_{e in X} p_e * prod_{e not in X} (1 - p_e)`` over every
    edge subset X in which node i reaches all n nodes.  Edges with p == 1 are
    forced into every subset (their complement has probability 0).  Subset
    probabilities come from two half-subset product tables; per-node
    accumulation is compensated (Kahan) so edge reorderings stay within 1e-12.
    """
    m = len(esrc)
    src = [int(x) for x in esrc]
    dst = [int(x) for x in edst]
    pw = [float(x) for x in p]
    forced = [k for k in range(m) if pw[k] >= 1.0]
    free = [k for k in range(m) if pw[k] < 1.0]
    a = (len(free) + 1) // 2
    lo_edges, hi_edges = free[:a], free[a:]

    def build_table(kidx: list[int]) -> list[float]:
        table = [1.0]
        for e in kidx:
            q = 1.0 - pw[e]
            w = pw[e]
            table = [t * q for t in table] + [t * w for t in table]
        return table

    t_lo = build_table(lo_edges)
    t_hi = build_table(hi_edges)
    mask_lo = (1 << a) - 1

    totals = [0.0] * n
    comp = [0.0] * n
    fhead = [-1] * n
    fnext = [-1] * m
    rhead = [-1] * n
    rnext = [-1] * m
    seen = [-1] * n
    mark = [-1] * n
    stack = [0] * n
    stamp = 0
    nfree = len(free)
    for x in range(1 << nfree):
        px = t_lo[x & mask_lo] * t_hi[x >> a]
        # rebuild forward and reverse adjacency for X = forced + selected free
        for v in range(n):
            fhead[v] = -1
            rhead[v] = -1
        for e in forced:
            u, v = src[e], dst[e]
            fnext[e] = fhead[u]
            fhead[u] = e
            rnext[e] = rhead[v]
            rhead[v] = e
        for bit in range(nfree):
            if x >> bit & 1:
                e = free[bit]
                u, v = src[e], dst[e]
                fnext[e] = fhead[u]
                fhead[u] = e
                rnext[e] = rhead[v]
                rhead[v] = e
        # mother-vertex scan: the last DFS-tree start is the only node that
        # can reach everything
        stamp += 1
        cand = -1
        for s in range(n):
            if seen[s] == stamp:
                continue
            cand = s
            seen[s] = stamp
            top = 0
            stack[top] = s
            top += 1
            while top:
                top -= 1
                u = stack[top]
                e = fhead[u]
                while e != -1:
                    v = dst[e]
                    if seen[v] != stamp:
                        seen[v] = stamp
                        stack[top] = v
                        top += 1
                    e = fnext[e]
        # verify: forward reach of cand covers all nodes
        stamp += 1
        seen[cand] = stamp
        top = 0
        stack[top] = cand
        top += 1
        cnt = 1
        while top:
            top -= 1
            u = stack[top]
            e = fhead[u]
            while e != -1:
                v = dst[e]
                if seen[v] != stamp:
                    seen[v] = stamp
                    cnt += 1
                    stack[top] = v
                    top += 1
                e = fnext[e]
        if cnt != n:
            continue
        # nodes reaching cand (reverse reach) are exactly the reach-all nodes
        mark[cand] = stamp
        top = 0
        stack[top] = cand
        top += 1
        y = px - comp[cand]
        t = totals[cand] + y
        comp[cand] = (t - totals[cand]) - y
        totals[cand] = t
        while top:
            top -= 1
            v = stack[top]
            e = rhead[v]
            while e != -1:
                u = src[e]
                if mark[u] != stamp:
                    mark[u] = stamp
                    y = px - comp[u]
                    t = totals[u] + y
                    comp[u] = (t - totals[u]) - y
                    totals[u] = t
                    stack[top] = u
                    top += 1
                e = rnext[e]
    return np.asarray(totals, dtype=np.float64)
