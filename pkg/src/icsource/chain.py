"""Conversions from a candidate subgraph to a Markov chain.

All three schemes reverse every edge — graph edge (v_i, v_j) becomes chain
transition (s_j, s_i) — so walking the chain traces diffusions backwards:

* ``naive``: row j holds p(i->j) / w_in(j).  Rows are properly normalised but
  the per-node in-mass is erased, which is exactly why this scheme misranks.
* ``self_loops``: off-diagonal q(j,i) = p(i->j) / max_in and a diagonal
  remainder (max_in - w_in(j)) / max_in.  The stationary distribution is the
  score vector verbatim.
* ``no_loops``: the naive matrix bit-for-bit plus the stored w_in vector; the
  stationary distribution is divided by w_in and renormalised afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import ConversionError
from .graph import WeightedDigraph

SCHEMES = ("naive", "self_loops", "no_loops")

#: Chains with at most this many states use a dense transition matrix.
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class MarkovChain:
    """Row-stochastic transition matrix plus the data needed to undo a scheme."""

    Q: np.ndarray | sparse.csr_matrix
    scheme: str
    w_in: np.ndarray
    max_in: float | None
    irreducible: bool

    @property
    def n_states(self) -> int:
        return self.Q.shape[0]

    @property
    def is_dense(self) -> bool:
        return isinstance(self.Q, np.ndarray)

    def row(self, i: int) -> np.ndarray:
        q = self.Q[i] if self.is_dense else self.Q[i].toarray()[0]
        return np.asarray(q)


def _conversion_inputs(g: WeightedDigraph) -> np.ndarray:
    g.require_weighted()
    w_in = g.weighted_in_degrees()
    zero = np.nonzero(w_in == 0.0)[0]
    if len(zero):
        raise ConversionError(
            f"node {int(zero[0])} has no in-edges; every node needs w_in > 0"
        )
    return w_in


def _reversed_normalized(g: WeightedDigraph, denom: np.ndarray, dense_limit: int):
    """Transition entries Q[dst, src] = p / denom[dst] as dense or CSR."""
    n = g.n
    if n <= dense_limit:
        Q = np.zeros((n, n))
        Q[g.dst, g.src] = g.p / denom[g.dst]
        return Q
    return sparse.csr_matrix(
        (g.p / denom[g.dst], (g.dst, g.src)), shape=(n, n)
    )


def _strongly_connected(g: WeightedDigraph) -> bool:
    if g.n == 1:
        return True
    pattern = sparse.csr_matrix(
        (np.ones(g.num_edges, dtype=np.int8), (g.src, g.dst)), shape=(g.n, g.n)
    )
    n_comp, _ = connected_components(pattern, directed=True, connection="strong")
    return n_comp == 1

def convert_naive(g: WeightedDigraph, *, dense_limit: int = DENSE_LIMIT) -> MarkovChain:
    """Reverse edges and normalise each row by its own in-mass."""
    w_in = _conversion_inputs(g)
    Q = _reversed_normalized(g, w_in, dense_limit)
    return MarkovChain(Q, "naive", w_in, None, _strongly_connected(g))


def convert_no_loops(g: WeightedDigraph, *, dense_limit: int = DENSE_LIMIT) -> MarkovChain:
    """Same matrix as the naive scheme, carrying w_in for the restore step."""
    w_in = _conversion_inputs(g)
    Q = _reversed_normalized(g, w_in, dense_limit)
    return MarkovChain(Q, "no_loops", w_in, None, _strongly_connected(g))


def convert_self_loops(g: WeightedDigraph, *, dense_limit: int = DENSE_LIMIT) -> MarkovChain:
    """Normalise all rows by max_in, parking the remainder on the diagonal."""
    w_in = _conversion_inputs(g)
    max_in = float(w_in.max())
    n = g.n
    diag = (max_in - w_in) / max_in
    if n <= dense_limit:
        Q = np.zeros((n, n))
        Q[g.dst, g.src] = g.p / max_in
        Q[np.arange(n), np.arange(n)] = diag
    else:
        keep = diag != 0.0
        rows = np.concatenate([g.dst, np.nonzero(keep)[0]])
        cols = np.concatenate([g.src, np.nonzero(keep)[0]])
        vals = np.concatenate([g.p / max_in, diag[keep]])
        Q = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return MarkovChain(Q, "self_loops", w_in, max_in, _strongly_connected(g))


def dump_chain(mc: MarkovChain) -> str:
    """Matrix-market-style text dump: state count, then ``i j q`` triples."""
    lines = [str(mc.n_states)]
    if mc.is_dense:
        rows, cols = np.nonzero(mc.Q)
        vals = mc.Q[rows, cols]
    else:
        coo = mc.Q.tocoo()
        order = np.lexsort((coo.col, coo.row))
        rows, cols, vals = coo.row[order], coo.col[order], coo.data[order]
    for i, j, q in zip(rows, cols, vals):
        lines.append(f"{int(i)} {int(j)} {q:.12g}")
    return "\n".join(lines) + "\n"
