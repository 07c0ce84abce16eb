"""Compiled kernels; semantics mirror ``_kernels_py`` exactly.

The pure module is the reference: keep the control flow of the two in lock
step when editing either.  The backend-parity tests compare them output for
output.
"""

import numpy as np

from libc.stdint cimport int32_t, int64_t, uint64_t
from libc.math cimport HUGE_VAL, INFINITY

cdef uint64_t _MUL1 = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t _MUL2 = <uint64_t>0x94D049BB133111EB
cdef uint64_t _GOLDEN = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t _SEED_OFFSET = <uint64_t>0x6A09E667F3BCC909
cdef double _INV_2_53 = 2.0 ** -53


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * _MUL1
    z = (z ^ (z >> 27)) * _MUL2
    return z ^ (z >> 31)


cdef inline double _attempt_u01(uint64_t base, uint64_t rnd, uint64_t parent,
                                uint64_t child) noexcept nogil:
    cdef uint64_t h = _mix64(base ^ rnd)
    h = _mix64(h ^ parent)
    h = _mix64(h ^ child)
    return <double>(h >> 11) * _INV_2_53


def ic_cascade(const int64_t[::1] out_ptr, const int32_t[::1] out_dst,
               const double[::1] out_p, int source, unsigned long long seed):
    """Compiled twin of ``_kernels_py.ic_cascade``."""
    cdef Py_ssize_t n = out_ptr.shape[0] - 1
    parents_arr = np.full(n, -2, dtype=np.int64)
    round_arr = np.full(n, -1, dtype=np.int64)
    frontier_arr = np.empty(n, dtype=np.int64)
    next_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] parents = parents_arr
    cdef int64_t[::1] round_of = round_arr
    cdef int64_t[::1] frontier = frontier_arr
    cdef int64_t[::1] nxt = next_arr
    cdef uint64_t base = _mix64(<uint64_t>seed + _SEED_OFFSET)
    cdef Py_ssize_t nf = 1, nn, fi, k
    cdef int64_t i, j, t = 0
    parents[source] = -1
    round_of[source] = 0
    frontier[0] = source
    with nogil:
        while nf > 0:
            t += 1
            nn = 0
            for fi in range(nf):
                i = frontier[fi]
                for k in range(out_ptr[i], out_ptr[i + 1]):
                    j = out_dst[k]
                    if round_of[j] >= 0:
                        continue
                    if _attempt_u01(base, <uint64_t>t, <uint64_t>i, <uint64_t>j) < out_p[k]:
                        round_of[j] = t
                        parents[j] = i
                        nxt[nn] = j
                        nn += 1
            # ascending order for the next frontier (insertion sort; frontiers
            # arrive nearly sorted because parents are scanned in order)
            for fi in range(1, nn):
                j = nxt[fi]
                k = fi
                while k > 0 and nxt[k - 1] > j:
                    nxt[k] = nxt[k - 1]
                    k -= 1
                nxt[k] = j
            for fi in range(nn):
                frontier[fi] = nxt[fi]
            nf = nn
    return parents_arr, round_arr


def cascade_sizes(const int64_t[::1] out_ptr, const int32_t[::1] out_dst,
                  const double[::1] out_p, const int64_t[::1] sources,
                  const uint64_t[::1] seeds):
    """Compiled twin of ``_kernels_py.cascade_sizes``."""
    cdef Py_ssize_t n = out_ptr.shape[0] - 1
    cdef Py_ssize_t nb = sources.shape[0]
    out_arr = np.empty(nb, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    stamp_arr = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] stamp = stamp_arr
    frontier_arr = np.empty(n, dtype=np.int64)
    next_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] frontier = frontier_arr
    cdef int64_t[::1] nxt = next_arr
    cdef uint64_t base
    cdef Py_ssize_t b, nf, nn, fi, k
    cdef int64_t i, j, t, size, source
    with nogil:
        for b in range(nb):
            source = sources[b]
            base = _mix64(seeds[b] + _SEED_OFFSET)
            stamp[source] = b
            size = 1
            frontier[0] = source
            nf = 1
            t = 0
            while nf > 0:
                t += 1
                nn = 0
                for fi in range(nf):
                    i = frontier[fi]
                    for k in range(out_ptr[i], out_ptr[i + 1]):
                        j = out_dst[k]
                        if stamp[j] == b:
                            continue
                        if _attempt_u01(base, <uint64_t>t, <uint64_t>i, <uint64_t>j) < out_p[k]:
                            stamp[j] = b
                            nxt[nn] = j
                            nn += 1
                size += nn
                for fi in range(nn):
                    frontier[fi] = nxt[fi]
                nf = nn
            out[b] = size
    return out_arr


def walk_visits(const int64_t[::1] indptr, const int32_t[::1] indices,
                const double[::1] cumvals, long long steps,
                unsigned long long seed):
    """Compiled twin of ``_kernels_py.walk_visits``."""
    cdef Py_ssize_t k = indptr.shape[0] - 1
    visits_arr = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] visits = visits_arr
    cdef uint64_t state = <uint64_t>seed
    cdef double u
    cdef int64_t cur, lo, hi, mid
    cdef long long step
    state = state + _GOLDEN
    u = <double>(_mix64(state) >> 11) * _INV_2_53
    cur = <int64_t>(u * k)
    if cur > k - 1:
        cur = k - 1
    visits[cur] += 1
    with nogil:
        for step in range(steps):
            state = state + _GOLDEN
            u = <double>(_mix64(state) >> 11) * _INV_2_53
            lo = indptr[cur]
            hi = indptr[cur + 1]
            # first position whose cumulative value exceeds u (upper bound)
            while lo < hi:
                mid = (lo + hi) >> 1
                if cumvals[mid] > u:
                    hi = mid
                else:
                    lo = mid + 1
            if lo >= indptr[cur + 1]:
                lo = indptr[cur + 1] - 1
            cur = indices[lo]
            visits[cur] += 1
    return visits_arr


cdef double _min_cost_arb(int n0, Py_ssize_t m0,
                          const int32_t[::1] esrc, const int32_t[::1] edst,
                          const double[::1] elogw,
                          int64_t[::1] wsrc, int64_t[::1] wdst, double[::1] wcost,
                          int64_t[::1] in_u, double[::1] in_w,
                          int64_t[::1] comp, int64_t[::1] vis,
                          int root0) noexcept nogil:
    cdef Py_ssize_t m = m0, k, mm
    cdef int n = n0, root = root0, v, s, ncomp
    cdef int64_t u, cu, cv
    cdef double total = 0.0, c
    for k in range(m):
        wsrc[k] = esrc[k]
        wdst[k] = edst[k]
        wcost[k] = -elogw[k]
    while True:
        for v in range(n):
            in_w[v] = HUGE_VAL
            in_u[v] = -1
        for k in range(m):
            v = <int>wdst[k]
            if v != root and wcost[k] < in_w[v]:
                in_w[v] = wcost[k]
                in_u[v] = wsrc[k]
        for v in range(n):
            if v != root and in_w[v] == HUGE_VAL:
                return HUGE_VAL
            if v != root:
                total += in_w[v]
        # find cycles in the chosen in-edge pointers
        for v in range(n):
            comp[v] = -1
            vis[v] = -1
        ncomp = 0
        for s in range(n):
            v = s
            while v != root and vis[v] == -1:
                vis[v] = s
                v = <int>in_u[v]
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
        mm = 0
        for k in range(m):
            cu = comp[wsrc[k]]
            cv = comp[wdst[k]]
            if cu != cv:
                c = wcost[k] - in_w[wdst[k]]
                wsrc[mm] = cu
                wdst[mm] = cv
                wcost[mm] = c
                mm += 1
        m = mm
        root = <int>comp[root]
        n = ncomp


def arborescence_log_weights(int n, const int32_t[::1] esrc,
                             const int32_t[::1] edst, const double[::1] elogw):
    """Compiled twin of ``_kernels_py.arborescence_log_weights``."""
    cdef Py_ssize_t m = esrc.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    wsrc_arr = np.empty(m, dtype=np.int64)
    wdst_arr = np.empty(m, dtype=np.int64)
    wcost_arr = np.empty(m, dtype=np.float64)
    in_u_arr = np.empty(n, dtype=np.int64)
    in_w_arr = np.empty(n, dtype=np.float64)
    comp_arr = np.empty(n, dtype=np.int64)
    vis_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] wsrc = wsrc_arr
    cdef int64_t[::1] wdst = wdst_arr
    cdef double[::1] wcost = wcost_arr
    cdef int64_t[::1] in_u = in_u_arr
    cdef double[::1] in_w = in_w_arr
    cdef int64_t[::1] comp = comp_arr
    cdef int64_t[::1] vis = vis_arr
    cdef int root
    cdef double cost
    with nogil:
        for root in range(n):
            cost = _min_cost_arb(n, m, esrc, edst, elogw,
                                 wsrc, wdst, wcost, in_u, in_w, comp, vis, root)
            out[root] = -cost if cost != HUGE_VAL else -INFINITY
    return out_arr


def subset_source_probability(int n, const int32_t[::1] esrc,
                              const int32_t[::1] edst, const double[::1] p):
    """Compiled twin of ``_kernels_py.subset_source_probability``."""
    cdef Py_ssize_t m = esrc.shape[0]
    cdef Py_ssize_t nforced = 0, nfree = 0, k
    forced_arr = np.empty(m, dtype=np.int64)
    free_arr = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] forced = forced_arr
    cdef int64_t[::1] free_e = free_arr
    for k in range(m):
        if p[k] >= 1.0:
            forced[nforced] = k
            nforced += 1
        else:
            free_e[nfree] = k
            nfree += 1
    cdef Py_ssize_t a = (nfree + 1) // 2
    cdef Py_ssize_t b = nfree - a
    t_lo_arr = np.empty(1 << a, dtype=np.float64)
    t_hi_arr = np.empty(1 << b, dtype=np.float64)
    cdef double[::1] t_lo = t_lo_arr
    cdef double[::1] t_hi = t_hi_arr
    cdef Py_ssize_t size, i, bit
    cdef int64_t e
    cdef double q, w
    t_lo[0] = 1.0
    size = 1
    for k in range(a):
        e = free_e[k]
        q = 1.0 - p[e]
        w = p[e]
        for i in range(size):
            t_lo[size + i] = t_lo[i] * w
            t_lo[i] = t_lo[i] * q
        size <<= 1
    t_hi[0] = 1.0
    size = 1
    for k in range(b):
        e = free_e[a + k]
        q = 1.0 - p[e]
        w = p[e]
        for i in range(size):
            t_hi[size + i] = t_hi[i] * w
            t_hi[i] = t_hi[i] * q
        size <<= 1
    cdef uint64_t mask_lo = (<uint64_t>1 << a) - 1

    totals_arr = np.zeros(n, dtype=np.float64)
    kcomp_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] totals = totals_arr
    cdef double[::1] kcomp = kcomp_arr
    fhead_arr = np.full(n, -1, dtype=np.int64)
    rhead_arr = np.full(n, -1, dtype=np.int64)
    fnext_arr = np.full(m, -1, dtype=np.int64)
    rnext_arr = np.full(m, -1, dtype=np.int64)
    seen_arr = np.full(n, -1, dtype=np.int64)
    mark_arr = np.full(n, -1, dtype=np.int64)
    stack_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] fhead = fhead_arr
    cdef int64_t[::1] rhead = rhead_arr
    cdef int64_t[::1] fnext = fnext_arr
    cdef int64_t[::1] rnext = rnext_arr
    cdef int64_t[::1] seen = seen_arr
    cdef int64_t[::1] mark = mark_arr
    cdef int64_t[::1] stack = stack_arr
    cdef int64_t stamp = 0, cand, top, u, v, s, cnt
    cdef uint64_t x, nsub = <uint64_t>1 << nfree
    cdef double px, y, t
    with nogil:
        for x in range(nsub):
            px = t_lo[x & mask_lo] * t_hi[x >> a]
            # rebuild forward and reverse adjacency for X = forced + selected
            for v in range(n):
                fhead[v] = -1
                rhead[v] = -1
            for k in range(nforced):
                e = forced[k]
                u = esrc[e]
                v = edst[e]
                fnext[e] = fhead[u]
                fhead[u] = e
                rnext[e] = rhead[v]
                rhead[v] = e
            for bit in range(nfree):
                if (x >> bit) & 1:
                    e = free_e[bit]
                    u = esrc[e]
                    v = edst[e]
                    fnext[e] = fhead[u]
                    fhead[u] = e
                    rnext[e] = rhead[v]
                    rhead[v] = e
            # mother-vertex scan: the last DFS-tree start is the only node
            # that can reach everything
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
                        v = edst[e]
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
                    v = edst[e]
                    if seen[v] != stamp:
                        seen[v] = stamp
                        cnt += 1
                        stack[top] = v
                        top += 1
                    e = fnext[e]
            if cnt != n:
                continue
            # nodes reaching cand (reverse reach) are exactly the reach-alls
            mark[cand] = stamp
            top = 0
            stack[top] = cand
            top += 1
            y = px - kcomp[cand]
            t = totals[cand] + y
            kcomp[cand] = (t - totals[cand]) - y
            totals[cand] = t
            while top:
                top -= 1
                v = stack[top]
                e = rhead[v]
                while e != -1:
                    u = esrc[e]
                    if mark[u] != stamp:
                        mark[u] = stamp
                        y = px - kcomp[u]
                        t = totals[u] + y
                        kcomp[u] = (t - totals[u]) - y
                        totals[u] = t
                        stack[top] = u
                        top += 1
                    e = rnext[e]
    return totals_arr
