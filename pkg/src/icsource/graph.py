"""Weighted directed graphs: representation, random generation, edge-list I/O.

Nodes are dense integer ids ``0..n-1``.  Edge weights are influence
probabilities in ``(0, 1]``; a graph loaded from a weight-less edge list
carries NaN weights and must go through :func:`assign_weights` before any
simulation or conversion.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import EdgeListError, GraphStructureError, ParameterError

# Randomness for generation is consumed in fixed-size row blocks so the graph
# is a pure function of the seed, independent of total node count chunking.
_GEN_BLOCK_ROWS = 512


@dataclass(frozen=True)
class RandomGraphParams:
    """Parameters of the directed G(n, density) model with uniform weights.

    Every ordered pair (i, j), i != j, carries an edge independently with
    probability ``density``; each edge weight is drawn uniformly from
    ``(0, p_range]``.
    """

    n: int
    density: float
    p_range: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ParameterError(f"n must be >= 2, got {self.n}")
        if not 0.0 < self.density <= 1.0:
            raise ParameterError(f"density must be in (0, 1], got {self.density}")
        if not 0.0 < self.p_range <= 1.0:
            raise ParameterError(f"p_range must be in (0, 1], got {self.p_range}")


class WeightedDigraph:
    """Immutable weighted digraph with CSR adjacency in both directions.

    Edges are stored sorted by ``(src, dst)``.  ``out_ptr`` offsets into
    ``dst``/``p`` give out-adjacency; ``in_ptr``/``in_order`` give the
    permutation view sorted by ``(dst, src)``.
    """

    __slots__ = ("n", "src", "dst", "p", "out_ptr", "in_ptr", "in_order", "labels")

    def __init__(
        self,
        n: int,
        src: np.ndarray | Sequence[int],
        dst: np.ndarray | Sequence[int],
        p: np.ndarray | Sequence[float],
        labels: Sequence[str] | None = None,
        *,
        validate: bool = True,
    ):
        src = np.asarray(src, dtype=np.int32)
        dst = np.asarray(dst, dtype=np.int32)
        p = np.asarray(p, dtype=np.float64)
        if validate:
            if n < 1:
                raise ParameterError(f"node count must be >= 1, got {n}")
            if not (len(src) == len(dst) == len(p)):
                raise ParameterError("src, dst, p must have equal length")
            if len(src) and (src.min() < 0 or src.max() >= n or dst.min() < 0 or dst.max() >= n):
                raise GraphStructureError("edge endpoint out of range")
            if (src == dst).any():
                bad = int(src[src == dst][0])
                raise GraphStructureError(f"self loop at node {bad}")
            nan = np.isnan(p)
            if nan.any() and not nan.all():
                raise GraphStructureError("mixed weighted and weight-less edges")
            if not nan.any() and len(p) and (p.min() <= 0.0 or p.max() > 1.0):
                raise GraphStructureError("edge weights must lie in (0, 1]")
            if labels is not None and len(labels) != n:
                raise ParameterError("labels must have one entry per node")
        order = np.lexsort((dst, src))
        src, dst, p = src[order], dst[order], p[order]
        if validate and len(src) > 1:
            dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if dup.any():
                k = int(np.nonzero(dup)[0][0])
                raise GraphStructureError(
                    f"duplicate edge ({int(src[k])}, {int(dst[k])})"
                )
        self.n = int(n)
        self.src = src
        self.dst = dst
        self.p = p
        counts = np.bincount(src, minlength=n).astype(np.int64)
        self.out_ptr = np.concatenate(([0], np.cumsum(counts)))
        self.in_order = np.lexsort((src, dst))
        in_counts = np.bincount(dst, minlength=n).astype(np.int64)
        self.in_ptr = np.concatenate(([0], np.cumsum(in_counts)))
        self.labels = tuple(labels) if labels is not None else None
        for a in (self.src, self.dst, self.p, self.out_ptr, self.in_ptr, self.in_order):
            a.flags.writeable = False

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Sequence[tuple[int, int, float]],
        labels: Sequence[str] | None = None,
    ) -> "WeightedDigraph":
        """Build a graph from ``(src, dst, weight)`` triples."""
        if len(edges):
            src, dst, p = zip(*edges)
        else:
            src, dst, p = (), (), ()
        return cls(n, src, dst, p, labels)

    # -- basic queries -------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return self.n

    @property
    def num_edges(self) -> int:
        return len(self.src)

    @property
    def is_weighted(self) -> bool:
        return not (len(self.p) and math.isnan(self.p[0]))

    def require_weighted(self) -> None:
        if not self.is_weighted:
            raise GraphStructureError(
                "graph has weight-less edges; run assign_weights first"
            )

    def out_edges(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """(destinations, weights) of edges leaving ``v``, ascending by destination."""
        self._check_node(v)
        lo, hi = self.out_ptr[v], self.out_ptr[v + 1]
        return self.dst[lo:hi], self.p[lo:hi]

    def in_edges(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """(sources, weights) of edges entering ``v``, ascending by source."""
        self._check_node(v)
        idx = self.in_order[self.in_ptr[v] : self.in_ptr[v + 1]]
        return self.src[idx], self.p[idx]

    def weighted_out_degrees(self) -> np.ndarray:
        return np.bincount(self.src, weights=self.p, minlength=self.n)

    def weighted_in_degrees(self) -> np.ndarray:
        return np.bincount(self.dst, weights=self.p, minlength=self.n)

    def weighted_out_degree(self, v: int) -> float:
        self._check_node(v)
        lo, hi = self.out_ptr[v], self.out_ptr[v + 1]
        return float(self.p[lo:hi].sum())

    def weighted_in_degree(self, v: int) -> float:
        self._check_node(v)
        idx = self.in_order[self.in_ptr[v] : self.in_ptr[v + 1]]
        return float(self.p[idx].sum())

    def edge_list(self) -> list[tuple[int, int, float]]:
        return [
            (int(u), int(v), float(w))
            for u, v, w in zip(self.src, self.dst, self.p)
        ]

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ParameterError(f"node {v} out of range [0, {self.n})")

    # -- identity ------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.labels == other.labels
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.p, other.p, equal_nan=True)
        )

    __hash__ = None  # mutable ndarray members

    def __repr__(self) -> str:
        return f"WeightedDigraph(n={self.n}, m={self.num_edges})"

    def fingerprint(self) -> str:
        """Stable 16-hex-digit digest of the structure and weights."""
        h = hashlib.sha256()
        h.update(self.n.to_bytes(8, "little"))
        h.update(self.src.tobytes())
        h.update(self.dst.tobytes())
        h.update(self.p.tobytes())
        return h.hexdigest()[:16]

    # -- label handling ------------------------------------------------------

    def label_of(self, v: int) -> str:
        self._check_node(v)
        return self.labels[v] if self.labels is not None else str(v)

    def resolve_nodes(self, names: Iterable[str]) -> list[int]:
        """Map node labels (or decimal ids when unlabeled) to dense ids."""
        if self.labels is not None:
            lookup = {lab: i for i, lab in enumerate(self.labels)}
            out = []
            for name in names:
                if name not in lookup:
                    raise ParameterError(f"unknown node label {name!r}")
                out.append(lookup[name])
            return out
        out = []
        for name in names:
            try:
                v = int(name)
            except ValueError:
                raise ParameterError(f"unknown node id {name!r}") from None
            self._check_node(v)
            out.append(v)
        return out

    # -- subgraphs -----------------------------------------------------------

    def induced_subgraph(self, nodes: Iterable[int]) -> tuple["WeightedDigraph", np.ndarray]:
        """Subgraph on ``nodes`` with ids remapped densely.

        Returns ``(subgraph, node_map)`` where ``node_map[new_id] == old_id``;
        new ids follow ascending old-id order.
        """
        node_arr = np.unique(np.asarray(list(nodes), dtype=np.int64))
        if len(node_arr) == 0:
            raise ParameterError("induced subgraph needs at least one node")
        if node_arr[0] < 0 or node_arr[-1] >= self.n:
            raise ParameterError("subgraph node out of range")
        member = np.zeros(self.n, dtype=bool)
        member[node_arr] = True
        keep = member[self.src] & member[self.dst]
        renumber = np.full(self.n, -1, dtype=np.int64)
        renumber[node_arr] = np.arange(len(node_arr))
        labels = None
        if self.labels is not None:
            labels = [self.labels[v] for v in node_arr]
        sub = WeightedDigraph(
            len(node_arr),
            renumber[self.src[keep]],
            renumber[self.dst[keep]],
            self.p[keep],
            labels,
            validate=False,
        )
        return sub, node_arr


def generate_random_graph(params: RandomGraphParams) -> WeightedDigraph:
    """Sample a directed G(n, density) graph with uniform (0, p_range] weights.

    Deterministic for a given seed: presence draws come from one
    ``random((rows, n))`` call per 512-row block (diagonal discarded), then a
    single ``uniform(0, p_range)`` call over all edges with exact zeros
    redrawn.
    """
    rng = np.random.Generator(np.random.PCG64(params.seed))
    n = params.n
    srcs: list[np.ndarray] = []
    dsts: list[np.ndarray] = []
    for r0 in range(0, n, _GEN_BLOCK_ROWS):
        r1 = min(n, r0 + _GEN_BLOCK_ROWS)
        block = rng.random((r1 - r0, n))
        mask = block < params.density
        mask[np.arange(r1 - r0), np.arange(r0, r1)] = False
        rows, cols = np.nonzero(mask)
        srcs.append((rows + r0).astype(np.int32))
        dsts.append(cols.astype(np.int32))
    src = np.concatenate(srcs)
    dst = np.concatenate(dsts)
    w = rng.uniform(0.0, params.p_range, size=len(src))
    while True:
        zero = w == 0.0
        if not zero.any():
            break
        w[zero] = rng.uniform(0.0, params.p_range, size=int(zero.sum()))
    return WeightedDigraph(n, src, dst, w, validate=False)


def assign_weights(
    g: WeightedDigraph, target_mean_wout: float, seed: int = 0
) -> WeightedDigraph:
    """Redraw all edge weights so the mean weighted out-degree matches a target.

    Weights are uniform on ``(0, p_range]`` with
    ``p_range = 2 * target_mean_wout * n / |E|`` clamped to 1; if the
    empirical mean lands more than 5% off (only possible under clamping) the
    weights are rescaled once, capped at 1.
    """
    if target_mean_wout <= 0.0:
        raise ParameterError("target_mean_wout must be positive")
    m = g.num_edges
    if m == 0:
        raise GraphStructureError("cannot assign weights to an edgeless graph")
    if target_mean_wout > m / g.n:
        raise ParameterError(
            f"target mean weighted out-degree {target_mean_wout} unreachable: "
            f"even all-1 weights give {m / g.n:.6g}"
        )
    p_range = min(1.0, 2.0 * target_mean_wout * g.n / m)
    rng = np.random.Generator(np.random.PCG64(seed))
    w = rng.uniform(0.0, p_range, size=m)
    while True:
        zero = w == 0.0
        if not zero.any():
            break
        w[zero] = rng.uniform(0.0, p_range, size=int(zero.sum()))
    mean = w.sum() / g.n
    if abs(mean - target_mean_wout) > 0.05 * target_mean_wout:
        w = np.minimum(1.0, w * (target_mean_wout / mean))
    return WeightedDigraph(g.n, g.src, g.dst, w, g.labels, validate=False)


# -- edge-list text format ---------------------------------------------------


def _label_sort_key(labels: set[str]):
    try:
        as_int = {lab: int(lab) for lab in labels}
    except ValueError:
        return lambda lab: lab
    return lambda lab: as_int[lab]


def load_edge_list(source: str | IO[str]) -> WeightedDigraph:
    """Parse edge-list text: one ``src dst weight`` (or ``src dst``) per line.

    ``#`` starts a comment line; blank lines are ignored.  Node labels are
    arbitrary whitespace-free tokens, remapped to dense ids (numeric sort when
    every label is an integer, else lexicographic); the original labels are
    kept on the graph.  Weight-less lines produce a graph that must go through
    :func:`assign_weights` before use.
    """
    text = source.read() if hasattr(source, "read") else source
    rows: list[tuple[str, str, float]] = []
    weighted: bool | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise EdgeListError(
                f"expected 'src dst weight' or 'src dst', got {raw!r}", lineno
            )
        has_w = len(fields) == 3
        if weighted is None:
            weighted = has_w
        elif weighted != has_w:
            raise EdgeListError("mix of weighted and weight-less lines", lineno)
        if has_w:
            try:
                w = float(fields[2])
            except ValueError:
                raise EdgeListError(f"bad weight {fields[2]!r}", lineno) from None
            if math.isnan(w) or not 0.0 < w <= 1.0:
                raise EdgeListError(f"weight {fields[2]} outside (0, 1]", lineno)
        else:
            w = math.nan
        if fields[0] == fields[1]:
            raise EdgeListError(f"self loop at {fields[0]!r}", lineno)
        rows.append((fields[0], fields[1], w))
    if not rows:
        raise EdgeListError("no edges found (graph must have >= 1 edge)")
    tokens = {t for r in rows for t in (r[0], r[1])}
    labels = sorted(tokens, key=_label_sort_key(tokens))
    ids = {lab: i for i, lab in enumerate(labels)}
    seen: set[tuple[int, int]] = set()
    src, dst, p = [], [], []
    for u_lab, v_lab, w in rows:
        u, v = ids[u_lab], ids[v_lab]
        if (u, v) in seen:
            raise EdgeListError(f"duplicate edge {u_lab!r} -> {v_lab!r}")
        seen.add((u, v))
        src.append(u)
        dst.append(v)
        p.append(w)
    return WeightedDigraph(len(labels), src, dst, p, labels)


def dump_edge_list(g: WeightedDigraph) -> str:
    """Serialize to edge-list text (weights at 12 significant digits)."""
    lines = []
    for u, v, w in zip(g.src, g.dst, g.p):
        a, b = g.label_of(int(u)), g.label_of(int(v))
        if g.is_weighted:
            lines.append(f"{a} {b} {w:.12g}")
        else:
            lines.append(f"{a} {b}")
    return "\n".join(lines) + "\n"
