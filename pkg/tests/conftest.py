"""Shared fixtures: the two hand-checked reference graphs and generators."""
from __future__ import annotations

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from icsource import WeightedDigraph

# Four-node ring: 0 -> 1 -> 2 -> 3 -> 0.  Every root has exactly one spanning
# out-tree, so all tree quantities are single products.
RING4_EDGES = [(0, 1, 0.1), (1, 2, 0.3), (2, 3, 0.6), (3, 0, 0.2)]

# Ring plus chord 3 -> 1: roots 2 and 3 gain a second spanning out-tree.
CHORD4_EDGES = RING4_EDGES + [(3, 1, 0.4)]

# The chord graph with a pendant node fed by 3; node 4 cannot reach anyone,
# so the candidate set of {0..4} is {0, 1, 2, 3}.
TAIL5_EDGES = CHORD4_EDGES + [(3, 4, 0.5)]

# Hand-computed spanning-out-tree weight sums (products over the tree edges).
RING4_GAMMA = [0.018, 0.036, 0.012, 0.006]
CHORD4_GAMMA = [0.018, 0.036, 0.06, 0.03]


@pytest.fixture
def ring4() -> WeightedDigraph:
    return WeightedDigraph.from_edges(4, RING4_EDGES)


@pytest.fixture
def chord4() -> WeightedDigraph:
    return WeightedDigraph.from_edges(4, CHORD4_EDGES)


@pytest.fixture
def tail5() -> WeightedDigraph:
    return WeightedDigraph.from_edges(5, TAIL5_EDGES)


def is_strongly_connected(g: WeightedDigraph) -> bool:
    if g.n == 1:
        return True
    if g.num_edges == 0:
        return False
    pattern = csr_matrix(
        (np.ones(g.num_edges, dtype=np.int8), (g.src, g.dst)), shape=(g.n, g.n)
    )
    n_comp, _ = connected_components(pattern, directed=True, connection="strong")
    return n_comp == 1


def random_digraph(
    rng: np.random.Generator,
    n: int,
    density: float = 0.5,
    p_lo: float = 0.05,
    p_hi: float = 0.95,
) -> WeightedDigraph:
    """A random weighted digraph (not necessarily strongly connected)."""
    mask = (rng.random((n, n)) < density) & ~np.eye(n, dtype=bool)
    src, dst = np.nonzero(mask)
    p = rng.uniform(p_lo, p_hi, len(src))
    return WeightedDigraph(n, src.astype(np.int32), dst.astype(np.int32), p)


def random_sc_digraph(
    rng: np.random.Generator,
    n: int,
    density: float = 0.5,
    p_lo: float = 0.05,
    p_hi: float = 0.95,
) -> WeightedDigraph:
    """Rejection-sample a strongly connected random weighted digraph."""
    for _ in range(1000):
        g = random_digraph(rng, n, density, p_lo, p_hi)
        if is_strongly_connected(g):
            return g
    raise AssertionError("could not sample a strongly connected digraph")
