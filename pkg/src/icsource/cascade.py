"""Independent-cascade diffusion: simulation, cascade records, tree weights."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .errors import InconsistentCascadeError
from .graph import WeightedDigraph


@dataclass(frozen=True)
class Cascade:
    """One realised diffusion: per-round activations plus the activation tree.

    ``rounds[0] == (source,)``; every other active node appears in exactly one
    later round and has exactly one activation edge from a node of the
    previous round, so the edges form an out-tree rooted at the source.
    """

    source: int
    rounds: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]
    active: frozenset[int] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "active", frozenset(v for rnd in self.rounds for v in rnd)
        )

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)

    def to_json(self) -> str:
        payload = {
            "source": self.source,
            "rounds": [list(r) for r in self.rounds],
            "edges": [list(e) for e in self.edges],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "Cascade":
        payload = json.loads(text)
        return cls(
            source=int(payload["source"]),
            rounds=tuple(tuple(int(v) for v in r) for r in payload["rounds"]),
            edges=tuple((int(a), int(b)) for a, b in payload["edges"]),
        )


def simulate_ic(g: WeightedDigraph, source: int, seed: int) -> Cascade:
    """Simulate one independent cascade from ``source``.

    Activation is in discrete rounds: every node that became active in round
    t-1 makes a single Bernoulli(p) attempt in round t on each out-neighbor
    still inactive, and never attempts again.  When several same-round parents
    succeed on one node, the lowest-id parent is recorded.  Deterministic
    given ``seed``.
    """
    g._check_node(source)
    g.require_weighted()
    parents, round_of = kernels.ic_cascade(g.out_ptr, g.dst, g.p, source, seed)
    n_rounds = int(round_of.max()) + 1
    rounds = []
    for t in range(n_rounds):
        members = np.nonzero(round_of == t)[0]
        rounds.append(tuple(int(v) for v in members))
    edges = tuple(
        (int(parents[v]), int(v))
        for v in np.nonzero(parents >= 0)[0]
    )
    return Cascade(source=source, rounds=tuple(rounds), edges=edges)


def validate_cascade(g: WeightedDigraph, c: Cascade) -> None:
    """Raise ``InconsistentCascadeError`` unless ``c`` is a valid cascade on ``g``."""
    if not c.rounds or c.rounds[0] != (c.source,):
        raise InconsistentCascadeError("round 0 must contain exactly the source")
    seen: set[int] = set()
    round_of: dict[int, int] = {}
    for t, rnd in enumerate(c.rounds):
        if t > 0 and not rnd:
            raise InconsistentCascadeError(f"round {t} is empty")
        for v in rnd:
            if not 0 <= v < g.n:
                raise InconsistentCascadeError(f"node {v} out of range")
            if v in seen:
                raise InconsistentCascadeError(f"node {v} active in two rounds")
            seen.add(v)
            round_of[v] = t
    children = {v for _, v in c.edges}
    if children != seen - {c.source}:
        raise InconsistentCascadeError(
            "activation edges must cover every active node except the source"
        )
    if len(children) != len(c.edges):
        raise InconsistentCascadeError("node with multiple activation edges")
    edge_set = {(int(u), int(v)) for u, v, _ in g.edge_list()}
    for u, v in c.edges:
        if (u, v) not in edge_set:
            raise InconsistentCascadeError(f"activation edge ({u}, {v}) not in graph")
        if round_of[u] != round_of[v] - 1:
            raise InconsistentCascadeError(
                f"activation edge ({u}, {v}) does not span consecutive rounds"
            )


def activation_tree_weight(g: WeightedDigraph, c: Cascade) -> float:
    """Product of activation-edge probabilities (1.0 for a singleton cascade)."""
    g.require_weighted()
    validate_cascade(g, c)
    weight = {(int(u), int(v)): float(w) for u, v, w in g.edge_list()}
    out = 1.0
    for u, v in c.edges:
        out *= weight[(u, v)]
    return out
