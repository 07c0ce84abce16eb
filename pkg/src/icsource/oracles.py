"""Exact reference computations: subset posteriors and spanning-tree sums.

These are deliberately independent of the chain pipeline — different
algorithms, different failure modes — so they can arbitrate its correctness.
Each carries a hard capacity guard because the work is exhaustive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .backend import kernels
from .errors import CapacityError, GraphStructureError
from .graph import WeightedDigraph
from .stationary import _tree_log_sums_from_matrix

#: brute_force_posterior enumerates 2^|E| subsets; 2^25 is the ceiling.
MAX_BRUTE_FORCE_EDGES = 25

#: enumerate_out_trees grows multiplicatively in node count.
MAX_ENUMERATION_NODES = 8


@dataclass(frozen=True)
class ExactPosterior:
    """Exact source probabilities for an observed active set.

    ``joint[i]`` is the total probability of edge-subset outcomes in which
    node i reaches every node; ``posterior`` is the normalised vector.
    """

    joint: np.ndarray
    posterior: np.ndarray


def brute_force_posterior(g: WeightedDigraph) -> ExactPosterior:
    """Exact posterior by enumerating every live-edge subset of ``g``.

    For each subset X of edges, ``p(X) = prod_{e in X} p_e * prod_{e not in
    X} (1 - p_e)``; node i accumulates p(X) whenever it reaches all nodes in
    the subset graph.  Guarded to ``|E| <= 25``.
    """
    g.require_weighted()
    if g.num_edges > MAX_BRUTE_FORCE_EDGES:
        raise CapacityError(
            f"brute force capped at {MAX_BRUTE_FORCE_EDGES} edges, got {g.num_edges}"
        )
    joint = kernels.subset_source_probability(g.n, g.src, g.dst, g.p)
    total = joint.sum()
    if total <= 0.0:
        raise GraphStructureError(
            "no node can reach the whole graph under any edge outcome"
        )
    return ExactPosterior(joint, joint / total)


def enumerate_out_trees(
    g: WeightedDigraph, root: int
) -> list[tuple[tuple[tuple[int, int], ...], float]]:
    """All spanning out-trees rooted at ``root`` as (edges, weight) pairs.

    Enumerates one in-edge choice per non-root node and keeps the acyclic
    combinations — transparently correct, which is the point of an oracle.
    Guarded to ``n <= 8``.
    """
    g.require_weighted()
    g._check_node(root)
    if g.n > MAX_ENUMERATION_NODES:
        raise CapacityError(
            f"tree enumeration capped at {MAX_ENUMERATION_NODES} nodes, got {g.n}"
        )
    others = [v for v in range(g.n) if v != root]
    choices = []
    for v in others:
        srcs, ws = g.in_edges(v)
        choices.append([(int(u), float(w)) for u, w in zip(srcs, ws)])
    out = []
    for combo in product(*choices):
        parent = {v: c[0] for v, c in zip(others, combo)}
        ok = True
        for v in others:
            hop = v
            seen = set()
            while hop != root:
                if hop in seen:
                    ok = False
                    break
                seen.add(hop)
                hop = parent[hop]
            if not ok:
                break
        if ok:
            edges = tuple(sorted((parent[v], v) for v in others))
            weight = math.prod(c[1] for c in combo)
            out.append((edges, weight))
    return out


def gamma_exact(g: WeightedDigraph) -> np.ndarray:
    """Per-root total weight of spanning out-trees, by enumeration (n <= 8)."""
    return np.array(
        [math.fsum(w for _, w in enumerate_out_trees(g, r)) for r in range(g.n)]
    )


def _adjacency(g: WeightedDigraph) -> np.ndarray:
    A = np.zeros((g.n, g.n))
    A[g.src, g.dst] = g.p
    return A


def tree_sum_log_weights(g: WeightedDigraph, direction: str = "out") -> np.ndarray:
    """Per-root log spanning-tree weight sums via Laplacian minors.

    ``direction="out"`` counts arborescences diverging from the root
    (minor of D_in - A); ``"in"`` counts trees converging to it (minor of
    D_out - A).  ``-inf`` marks roots with no spanning tree.
    """
    g.require_weighted()
    A = _adjacency(g)
    if direction == "out":
        return _tree_log_sums_from_matrix(A.T)
    if direction == "in":
        return _tree_log_sums_from_matrix(A)
    raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")


def arborescence_weight_sum(
    g: WeightedDigraph, root: int, direction: str = "out"
) -> float:
    """Total weight of spanning trees rooted at ``root`` (determinant route).

    The same quantity as summing :func:`enumerate_out_trees` weights, but via
    the directed matrix-tree theorem, so it has no size guard and serves as
    the independent cross-check of the enumeration (and of stationary
    solves, through the tree theorem).
    """
    g._check_node(root)
    logs = tree_sum_log_weights(g, direction)
    return float(np.exp(logs[root])) if np.isfinite(logs[root]) else 0.0
