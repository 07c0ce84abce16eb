"""Source detectors: the chain methods and the baselines they compete with."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.stats import rankdata

from .backend import kernels
from .candidates import CandidateSet, candidate_set
from .chain import MarkovChain, convert_naive, convert_no_loops, convert_self_loops
from .errors import ConversionError, ParameterError
from .graph import WeightedDigraph
from .rng import SeedStream, keyed_u64_array
from .stationary import (
    Distribution,
    ScoreVector,
    scores_from_stationary,
    stationary_direct,
    stationary_random_walk,
    tree_weight_stationary,
)

CHAIN_METHODS = ("self_loops", "no_loops", "naive")
BASELINE_METHODS = (
    "random",
    "max_out_deg",
    "min_in_deg",
    "max_out_in_ratio",
    "im_based",
    "max_arborescence",
)
METHODS = CHAIN_METHODS + BASELINE_METHODS


@dataclass(frozen=True)
class DetectorSpec:
    """A detector choice: method plus the knobs that method understands."""

    method: str
    stationary_mode: str = "direct"  # "direct" | "random_walk"; chain methods only
    steps: int | None = None
    restarts: int = 1
    im_simulations: int = 1000
    im_universe: str = "active"  # "active" | "full": graph the IM baseline simulates on
    seed: int = 0

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ParameterError(
                f"unknown method {self.method!r}; expected one of {', '.join(METHODS)}"
            )
        if self.stationary_mode not in ("direct", "random_walk"):
            raise ParameterError(
                f"stationary_mode must be 'direct' or 'random_walk', got {self.stationary_mode!r}"
            )
        if self.method in CHAIN_METHODS and self.stationary_mode == "random_walk":
            if self.steps is None or self.steps < 1:
                raise ParameterError("random_walk mode needs steps >= 1")
        if self.method not in CHAIN_METHODS and self.stationary_mode != "direct":
            raise ParameterError(f"{self.method} does not take a stationary mode")
        if self.restarts < 1:
            raise ParameterError("restarts must be >= 1")
        if self.im_simulations < 1:
            raise ParameterError("im_simulations must be >= 1")
        if self.im_universe not in ("active", "full"):
            raise ParameterError("im_universe must be 'active' or 'full'")

    def key(self) -> str:
        """Canonical identifier used in configs and reports."""
        if self.method in CHAIN_METHODS and self.stationary_mode == "random_walk":
            return f"{self.method}_rw{self.steps}"
        return self.method


class DetectionContext:
    """Per-(graph, active set) cache shared by all detectors of one trial.

    Guarantees every detector sees the same candidate extraction, and that
    chain conversions/solves happen once per scheme rather than once per
    detector variant.
    """

    def __init__(self, g: WeightedDigraph, cs: CandidateSet):
        self.g = g
        self.cs = cs
        self._chains: dict[str, MarkovChain] = {}
        self._direct: dict[str, Distribution] = {}
        self._tree: dict[str, Distribution] = {}

    def chain(self, scheme: str) -> MarkovChain:
        if scheme not in self._chains:
            build = {
                "naive": convert_naive,
                "no_loops": convert_no_loops,
                "self_loops": convert_self_loops,
            }[scheme]
            self._chains[scheme] = build(self.cs.graph)
        return self._chains[scheme]

    def direct_pi(self, scheme: str) -> Distribution:
        # naive and no_loops share one matrix bit-for-bit; solve it once
        alias = "no_loops" if scheme == "naive" else scheme
        if alias not in self._direct:
            self._direct[alias] = stationary_direct(self.chain(alias))
        return self._direct[alias]

    def tree_pi(self, scheme: str) -> Distribution:
        alias = "no_loops" if scheme == "naive" else scheme
        if alias not in self._tree:
            self._tree[alias] = tree_weight_stationary(self.chain(alias))
        return self._tree[alias]


def detect(
    g: WeightedDigraph, active: Iterable[int], spec: DetectorSpec
) -> ScoreVector:
    """Score candidate sources of ``active`` under one detector spec.

    Extracts the candidate set, then dispatches on the method.  The returned
    ScoreVector is over candidate nodes (parent-graph ids); a singleton
    candidate set short-circuits every method.
    """
    cs = candidate_set(g, active)
    return run_detector(DetectionContext(g, cs), spec, spec.seed)


def run_detector(ctx: DetectionContext, spec: DetectorSpec, seed: int) -> ScoreVector:
    """Run one detector against a shared per-trial context."""
    cs = ctx.cs
    if cs.is_singleton:
        return ScoreVector(cs.nodes.copy(), np.ones(1))
    if spec.method in CHAIN_METHODS:
        sv = _run_chain_method(ctx, spec, seed)
    elif spec.method == "random":
        sv = _run_random(cs, seed)
    elif spec.method == "im_based":
        sv = _run_im(ctx, spec, seed)
    elif spec.method == "max_arborescence":
        sv = baseline_max_arborescence(cs.graph)
    else:
        kind = {
            "max_out_deg": "max_out",
            "min_in_deg": "min_in",
            "max_out_in_ratio": "max_out_in_ratio",
        }[spec.method]
        sv = baseline_degree(cs.graph, kind)
    return ScoreVector(
        cs.node_map[np.asarray(sv.nodes, dtype=np.int64)],
        sv.scores,
        sv.tree_fallback,
    )


def _run_chain_method(ctx: DetectionContext, spec: DetectorSpec, seed: int) -> ScoreVector:
    mc = ctx.chain(spec.method)
    if not mc.irreducible:
        # reducible chains have no unique stationary distribution under either
        # mode; reroute to tree-weight sums, which extend it exactly
        return scores_from_stationary(mc, ctx.tree_pi(spec.method))
    if spec.stationary_mode == "direct":
        pi = ctx.direct_pi(spec.method)
    else:
        pi = stationary_random_walk(mc, spec.steps, seed, restarts=spec.restarts)
    return scores_from_stationary(mc, pi)


def _run_random(cs: CandidateSet, seed: int) -> ScoreVector:
    k = len(cs.nodes)
    u = SeedStream(seed).next_u01()
    pick = min(int(u * k), k - 1)
    scores = np.zeros(k)
    scores[pick] = 1.0
    return ScoreVector(np.arange(k), scores)


def _run_im(ctx: DetectionContext, spec: DetectorSpec, seed: int) -> ScoreVector:
    if spec.im_universe == "active":
        g_sim = ctx.cs.active_graph
        lookup = {int(v): i for i, v in enumerate(ctx.cs.active_map)}
        cands = np.array([lookup[int(v)] for v in ctx.cs.nodes], dtype=np.int64)
    else:
        g_sim = ctx.g
        cands = ctx.cs.nodes.astype(np.int64)
    sv = baseline_im(g_sim, cands, spec.im_simulations, seed)
    # map back to candidate-subgraph index space expected by run_detector
    return ScoreVector(np.arange(len(cands)), sv.scores)


def baseline_im(
    g_sim: WeightedDigraph, candidates: np.ndarray, simulations: int, seed: int
) -> ScoreVector:
    """Influence-maximisation baseline: score = mean cascade size.

    Each candidate seeds ``simulations`` cascades on ``g_sim``; the seed of
    simulation s from candidate c is derived from (seed, c, s), so results do
    not depend on execution order or worker fan-out.
    """
    g_sim.require_weighted()
    candidates = np.asarray(candidates, dtype=np.int64)
    sims = int(simulations)
    sources = np.repeat(candidates, sims)
    seeds = keyed_u64_array(
        seed,
        sources.astype(np.uint64),
        np.tile(np.arange(sims, dtype=np.uint64), len(candidates)),
    )
    sizes = kernels.cascade_sizes(g_sim.out_ptr, g_sim.dst, g_sim.p, sources, seeds)
    means = sizes.reshape(len(candidates), sims).mean(axis=1)
    return ScoreVector.from_raw(candidates, means)


def baseline_degree(g: WeightedDigraph, kind: str) -> ScoreVector:
    """Weighted-degree heuristics over the candidate subgraph.

    ``max_out`` scores by weighted out-degree, ``min_in`` by descending rank
    of weighted in-degree (average ranks on ties, so equal degrees tie
    exactly), ``max_out_in_ratio`` by w_out / w_in.
    """
    g.require_weighted()
    nodes = np.arange(g.n)
    if kind == "max_out":
        return ScoreVector.from_raw(nodes, g.weighted_out_degrees())
    if kind == "min_in":
        ranks = rankdata(-g.weighted_in_degrees(), method="average")
        return ScoreVector.from_raw(nodes, ranks)
    if kind == "max_out_in_ratio":
        w_in = g.weighted_in_degrees()
        if (w_in == 0.0).any():
            bad = int(np.nonzero(w_in == 0.0)[0][0])
            raise ConversionError(
                f"node {bad} has zero weighted in-degree; ratio undefined"
            )
        return ScoreVector.from_raw(nodes, g.weighted_out_degrees() / w_in)
    raise ParameterError(f"unknown degree baseline {kind!r}")


def max_arborescence_log_weights(g: WeightedDigraph) -> np.ndarray:
    """Per-root log weight of the best spanning arborescence (``-inf`` if none)."""
    g.require_weighted()
    return kernels.arborescence_log_weights(g.n, g.src, g.dst, np.log(g.p))


def baseline_max_arborescence(g: WeightedDigraph) -> ScoreVector:
    """Score each root by its maximum-weight spanning arborescence."""
    logs = max_arborescence_log_weights(g)
    finite = np.isfinite(logs)
    if not finite.any():
        raise ConversionError("no root has a spanning arborescence")
    scores = np.zeros(g.n)
    shift = logs[finite].max()
    scores[finite] = np.exp(logs[finite] - shift)
    return ScoreVector.from_raw(np.arange(g.n), scores)
