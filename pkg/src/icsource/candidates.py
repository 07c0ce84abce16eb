"""Candidate source extraction from an active set."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InconsistentCascadeError, ParameterError
from .graph import WeightedDigraph


@dataclass(frozen=True)
class CandidateSet:
    """The nodes of an active set that can have produced all of it.

    ``nodes`` are parent-graph ids (ascending).  ``graph`` is the induced
    candidate subgraph with ``node_map[new_id] == parent id``; likewise
    ``active_graph``/``active_map`` for the full active set, kept because
    some detectors simulate on it.
    """

    nodes: np.ndarray
    graph: WeightedDigraph
    node_map: np.ndarray
    active_graph: WeightedDigraph
    active_map: np.ndarray

    @property
    def is_singleton(self) -> bool:
        return len(self.nodes) == 1


def candidate_set(g: WeightedDigraph, active: Iterable[int]) -> CandidateSet:
    """Nodes of ``active`` with directed paths (inside the active subgraph) to
    every active node.

    These are exactly the members of the unique source component of the
    condensation of the induced active subgraph, provided that component
    reaches all others; a cascade's true source always satisfies this, so an
    empty result means the active set is not consistent with any single
    source and raises ``InconsistentCascadeError``.
    """
    active_arr = np.unique(np.asarray(list(active), dtype=np.int64))
    if len(active_arr) == 0:
        raise ParameterError("active set must be non-empty")
    ga, a_map = g.induced_subgraph(active_arr)
    k = ga.n
    if k == 1:
        nodes = a_map.copy()
        sub, s_map = g.induced_subgraph(nodes)
        return CandidateSet(nodes, sub, s_map, ga, a_map)
    pattern = csr_matrix(
        (np.ones(ga.num_edges, dtype=np.int8), (ga.src, ga.dst)), shape=(k, k)
    )
    n_comp, labels = connected_components(pattern, directed=True, connection="strong")
    if n_comp == 1:
        member = np.arange(k)
    else:
        cross = labels[ga.src] != labels[ga.dst]
        comp_indeg = np.bincount(labels[ga.dst[cross]], minlength=n_comp)
        sources = np.nonzero(comp_indeg == 0)[0]
        if len(sources) != 1:
            raise InconsistentCascadeError(
                "no single node reaches the whole active set"
            )
        start = int(sources[0])
        # condensation reachability from the source component
        pairs = {(int(a), int(b)) for a, b in zip(labels[ga.src[cross]], labels[ga.dst[cross]])}
        comp_adj: dict[int, list[int]] = {}
        for a, b in pairs:
            comp_adj.setdefault(a, []).append(b)
        reached = {start}
        stack = [start]
        while stack:
            a = stack.pop()
            for b in comp_adj.get(a, ()):
                if b not in reached:
                    reached.add(b)
                    stack.append(b)
        if len(reached) != n_comp:
            raise InconsistentCascadeError(
                "no single node reaches the whole active set"
            )
        member = np.nonzero(labels == start)[0]
    nodes = a_map[member]
    sub, s_map = g.induced_subgraph(nodes)
    return CandidateSet(nodes, sub, s_map, ga, a_map)
