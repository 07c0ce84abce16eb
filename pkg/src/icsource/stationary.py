"""Stationary distributions and the score vectors read off them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .backend import kernels
from .chain import MarkovChain
from .errors import NumericalError, ParameterError, ReducibleChainError
from .rng import derive_seed

_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class Distribution:
    """A probability vector over chain states, tagged with how it was obtained."""

    values: np.ndarray
    method: str  # "direct" | "random_walk" | "tree_weights"
    steps: int | None = None


@dataclass(frozen=True)
class ScoreVector:
    """Normalised source likelihood estimates over candidate nodes.

    ``nodes[i]`` is the id scored by ``scores[i]``; ids ascend, so the argmax
    resolves ties toward the lowest id.  ``tree_fallback`` flags scores that
    came from tree-weight sums because the chain was reducible.
    """

    nodes: np.ndarray
    scores: np.ndarray
    tree_fallback: bool = False

    @property
    def argmax_index(self) -> int:
        return int(np.argmax(self.scores))

    @property
    def argmax_node(self) -> int:
        return int(self.nodes[self.argmax_index])

    @classmethod
    def from_raw(
        cls, nodes: np.ndarray, raw: np.ndarray, *, tree_fallback: bool = False
    ) -> "ScoreVector":
        raw = np.asarray(raw, dtype=np.float64)
        if (raw < 0.0).any():
            raise ParameterError("scores must be nonnegative")
        total = raw.sum()
        if total <= 0.0:
            raise ParameterError("scores must have positive mass")
        return cls(np.asarray(nodes, dtype=np.int64), raw / total, tree_fallback)


def stationary_direct(mc: MarkovChain) -> Distribution:
    """Solve pi Q = pi, sum(pi) = 1 by a direct linear solve.

    Valid for periodic chains too (the solve does not iterate the chain).
    Raises ``ReducibleChainError`` for reducible chains, whose stationary
    distribution is not unique.
    """
    if not mc.irreducible:
        raise ReducibleChainError(
            "chain is reducible; use tree_weight_stationary instead"
        )
    n = mc.n_states
    b = np.zeros(n)
    b[-1] = 1.0
    if mc.is_dense:
        M = (mc.Q - np.eye(n)).T.copy()
        M[-1, :] = 1.0
        try:
            pi = np.linalg.solve(M, b)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"stationary solve failed: {exc}") from exc
        residual = float(np.abs(pi @ mc.Q - pi).max())
    else:
        M = (mc.Q - sparse.identity(n, format="csr")).T.tolil()
        M[-1, :] = 1.0
        pi = spsolve(M.tocsc(), b)
        if not np.isfinite(pi).all():
            raise NumericalError("sparse stationary solve failed")
        residual = float(np.abs(mc.Q.T.dot(pi) - pi).max())
    if residual > _RESIDUAL_TOL:
        raise NumericalError(
            f"stationary residual {residual:.3e} exceeds {_RESIDUAL_TOL:.0e}"
        )
    pi = np.where((pi < 0.0) & (pi > -_RESIDUAL_TOL), 0.0, pi)
    if (pi < 0.0).any():
        raise NumericalError("stationary solve produced negative mass")
    return Distribution(pi / pi.sum(), "direct")


def _walk_csr(mc: MarkovChain) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if mc.is_dense:
        Qs = sparse.csr_matrix(mc.Q)
    else:
        Qs = mc.Q
    indptr = Qs.indptr.astype(np.int64)
    indices = Qs.indices.astype(np.int32)
    data = Qs.data.astype(np.float64)
    if (np.diff(indptr) == 0).any():
        raise ParameterError("state without outgoing transitions; cannot walk")
    cs = np.cumsum(data)
    base = np.repeat(cs[indptr[:-1]] - data[indptr[:-1]], np.diff(indptr))
    cum = cs - base
    cum[indptr[1:] - 1] = 1.0  # guard against row sums a few ulps under 1
    return indptr, indices, cum


def random_walk_visit_counts(mc: MarkovChain, steps: int, seed: int) -> np.ndarray:
    """Visit counts (start state included) of one ``steps``-transition walk."""
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    indptr, indices, cum = _walk_csr(mc)
    return kernels.walk_visits(indptr, indices, cum, steps, seed)


def stationary_random_walk(
    mc: MarkovChain, steps: int, seed: int, *, restarts: int = 1
) -> Distribution:
    """Estimate the stationary distribution from random-walk visit frequencies.

    Runs ``restarts`` independent walks (seeds derived from ``seed``), each
    with a uniform random start state, and normalises the summed visit
    counts.  Counts include the start state, so one walk's counts sum to
    ``steps + 1``.
    """
    if restarts < 1:
        raise ParameterError("restarts must be >= 1")
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    indptr, indices, cum = _walk_csr(mc)
    counts = np.zeros(mc.n_states, dtype=np.int64)
    for w in range(restarts):
        counts += kernels.walk_visits(indptr, indices, cum, steps, derive_seed(seed, w))
    values = counts / (restarts * (steps + 1))
    return Distribution(values, "random_walk", steps)


def _tree_log_sums_from_matrix(A: np.ndarray) -> np.ndarray:
    """Per-root log of spanning in-tree weight sums of the digraph with
    adjacency ``A`` (A[i, j] = weight of edge i->j, diagonal ignored).

    Tutte's directed matrix-tree theorem: the weight sum of spanning trees
    converging to root r is the minor det of (D_out - A) with row/column r
    removed.  Computed via slogdet so large chains do not underflow.
    """
    n = A.shape[0]
    A = A.copy()
    np.fill_diagonal(A, 0.0)
    L = np.diag(A.sum(axis=1)) - A
    out = np.empty(n)
    idx = np.arange(n)
    for r in range(n):
        keep = idx != r
        minor = L[np.ix_(keep, keep)]
        sign, logdet = np.linalg.slogdet(minor)
        row_max = np.abs(minor).max(axis=1)
        if (row_max == 0.0).any() or sign <= 0.0:
            out[r] = -np.inf
            continue
        log_tol = np.log(1e-12) + np.log(row_max).sum()
        out[r] = logdet if logdet > log_tol else -np.inf
    return out


def tree_weight_stationary(mc: MarkovChain) -> Distribution:
    """Normalised spanning in-tree weight sums of the chain digraph.

    Equals the stationary distribution for irreducible chains (Markov chain
    tree theorem) and remains well defined for reducible ones, which is what
    makes it the fallback scorer.
    """
    Q = mc.Q if mc.is_dense else mc.Q.toarray()
    logs = _tree_log_sums_from_matrix(np.asarray(Q))
    finite = np.isfinite(logs)
    if not finite.any():
        raise NumericalError("chain has no spanning in-trees at any root")
    values = np.zeros(len(logs))
    shift = logs[finite].max()
    values[finite] = np.exp(logs[finite] - shift)
    return Distribution(values / values.sum(), "tree_weights")


def scores_from_stationary(mc: MarkovChain, pi: Distribution) -> ScoreVector:
    """Undo the conversion scheme: map a stationary estimate to source scores."""
    tree = pi.method == "tree_weights"
    if mc.scheme in ("naive", "self_loops"):
        return ScoreVector.from_raw(
            np.arange(mc.n_states), pi.values, tree_fallback=tree
        )
    if mc.scheme == "no_loops":
        return ScoreVector.from_raw(
            np.arange(mc.n_states), pi.values / mc.w_in, tree_fallback=tree
        )
    raise ParameterError(f"unknown scheme {mc.scheme!r}")


def score_self_loops(mc: MarkovChain, pi: Distribution) -> ScoreVector:
    """Scores for the self-loops scheme: the stationary vector verbatim."""
    if mc.scheme != "self_loops":
        raise ParameterError(f"expected a self_loops chain, got {mc.scheme!r}")
    return scores_from_stationary(mc, pi)


def score_no_loops(mc: MarkovChain, pi: Distribution) -> ScoreVector:
    """Scores for the no-loops scheme: stationary / w_in, renormalised."""
    if mc.scheme != "no_loops":
        raise ParameterError(f"expected a no_loops chain, got {mc.scheme!r}")
    return scores_from_stationary(mc, pi)
