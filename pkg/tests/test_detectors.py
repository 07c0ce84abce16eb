"""Detector dispatch, chain methods, and baseline scorers."""
import numpy as np
import pytest

from conftest import random_digraph
from icsource import (
    BASELINE_METHODS,
    CHAIN_METHODS,
    CandidateSet,
    ConversionError,
    DetectorSpec,
    METHODS,
    ParameterError,
    WeightedDigraph,
    baseline_degree,
    baseline_im,
    baseline_max_arborescence,
    candidate_set,
    detect,
    enumerate_out_trees,
    max_arborescence_log_weights,
)
from icsource.detectors import DetectionContext, run_detector

DIRECT_SELF = DetectorSpec(method="self_loops")
ALL_ACTIVE = {0, 1, 2, 3, 4}


def spec_for(method: str, **kw) -> DetectorSpec:
    return DetectorSpec(method=method, **kw)


# -- spec validation ---------------------------------------------------------


def test_method_registry():
    assert set(METHODS) == set(CHAIN_METHODS) | set(BASELINE_METHODS)
    assert len(METHODS) == 9


def test_spec_validation():
    with pytest.raises(ParameterError, match="unknown method"):
        DetectorSpec(method="psychic")
    with pytest.raises(ParameterError, match="stationary_mode"):
        DetectorSpec(method="self_loops", stationary_mode="sideways")
    with pytest.raises(ParameterError, match="steps"):
        DetectorSpec(method="self_loops", stationary_mode="random_walk")
    with pytest.raises(ParameterError, match="steps"):
        DetectorSpec(method="no_loops", stationary_mode="random_walk", steps=0)
    with pytest.raises(ParameterError, match="stationary mode"):
        DetectorSpec(method="random", stationary_mode="random_walk", steps=10)
    with pytest.raises(ParameterError, match="restarts"):
        DetectorSpec(method="self_loops", restarts=0)
    with pytest.raises(ParameterError, match="im_simulations"):
        DetectorSpec(method="im_based", im_simulations=0)
    with pytest.raises(ParameterError, match="im_universe"):
        DetectorSpec(method="im_based", im_universe="both")


def test_spec_keys():
    assert DIRECT_SELF.key() == "self_loops"
    assert spec_for("max_arborescence").key() == "max_arborescence"
    rw = spec_for("no_loops", stationary_mode="random_walk", steps=1000)
    assert rw.key() == "no_loops_rw1000"


# -- chain methods end to end ------------------------------------------------


def test_direct_chain_detection(tail5):
    sv = detect(tail5, ALL_ACTIVE, DIRECT_SELF)
    assert sv.nodes.tolist() == [0, 1, 2, 3]
    assert np.allclose(sv.scores, [0.125, 0.25, 5 / 12, 5 / 24], atol=1e-12)
    assert sv.argmax_node == 2
    assert not sv.tree_fallback


def test_self_and_no_loops_agree_directly(tail5):
    a = detect(tail5, ALL_ACTIVE, DIRECT_SELF)
    b = detect(tail5, ALL_ACTIVE, spec_for("no_loops"))
    assert np.abs(a.scores - b.scores).max() < 1e-9
    assert a.argmax_node == b.argmax_node


def test_naive_misranks_the_ring(ring4):
    sv = detect(ring4, range(4), spec_for("naive"))
    assert np.allclose(sv.scores, 0.25, atol=1e-12)  # in-mass erased: uniform
    corrected = detect(ring4, range(4), spec_for("no_loops"))
    assert np.allclose(corrected.scores, [0.25, 0.5, 1 / 6, 1 / 12], atol=1e-12)


def test_random_walk_mode_approaches_direct(tail5):
    exact = detect(tail5, ALL_ACTIVE, DIRECT_SELF)
    est = detect(
        tail5,
        ALL_ACTIVE,
        spec_for(
            "self_loops", stationary_mode="random_walk", steps=50_000, restarts=2, seed=4
        ),
    )
    assert np.abs(est.scores - exact.scores).max() < 0.02
    assert est.argmax_node == exact.argmax_node


def test_random_walk_mode_is_seed_deterministic(tail5):
    spec = spec_for("no_loops", stationary_mode="random_walk", steps=500, seed=11)
    a = detect(tail5, ALL_ACTIVE, spec)
    b = detect(tail5, ALL_ACTIVE, spec)
    assert np.array_equal(a.scores, b.scores)
    c = detect(
        tail5,
        ALL_ACTIVE,
        spec_for("no_loops", stationary_mode="random_walk", steps=500, seed=12),
    )
    assert not np.array_equal(a.scores, c.scores)


def test_singleton_candidate_short_circuits(chord4):
    for method in METHODS:
        sv = detect(chord4, [2], spec_for(method))
        assert sv.nodes.tolist() == [2]
        assert sv.scores.tolist() == [1.0]
        assert sv.argmax_node == 2


def test_reducible_chain_falls_back_to_tree_weights():
    # Not a genuine candidate set (2 reaches nobody), but the API accepts
    # hand-built ones; the chain is reducible, so scores come from tree sums.
    g = WeightedDigraph.from_edges(3, [(0, 1, 0.5), (1, 0, 0.5), (1, 2, 0.5)])
    ident = np.arange(3)
    cs = CandidateSet(ident, g, ident, g, ident)
    ctx = DetectionContext(g, cs)
    sv = run_detector(ctx, DIRECT_SELF, seed=0)
    assert sv.tree_fallback
    assert sv.scores.sum() == pytest.approx(1.0)
    # Walk mode reroutes identically rather than walking a trapped chain.
    walked = run_detector(
        ctx,
        spec_for("self_loops", stationary_mode="random_walk", steps=100),
        seed=0,
    )
    assert np.array_equal(walked.scores, sv.scores)


# -- degree baselines --------------------------------------------------------


def test_degree_baselines_on_chord(chord4):
    out = baseline_degree(chord4, "max_out")
    assert np.allclose(out.scores, np.array([0.1, 0.3, 0.6, 0.6]) / 1.6)
    assert out.argmax_node == 3  # 0.2 + 0.4 beats 0.6 by one ulp

    inn = baseline_degree(chord4, "min_in")
    assert inn.argmax_node == 0  # smallest weighted in-degree
    assert np.allclose(inn.scores, np.array([4.0, 2.0, 3.0, 1.0]) / 10.0)

    ratio = baseline_degree(chord4, "max_out_in_ratio")
    assert np.allclose(ratio.scores, np.array([0.5, 0.6, 2.0, 1.0]) / 4.1)
    assert ratio.argmax_node == 2


def test_exact_degree_ties_resolve_to_lowest_id():
    g = WeightedDigraph.from_edges(2, [(0, 1, 0.4), (1, 0, 0.4)])
    for kind in ("max_out", "min_in", "max_out_in_ratio"):
        sv = baseline_degree(g, kind)
        assert sv.scores.tolist() == [0.5, 0.5]
        assert sv.argmax_node == 0


def test_ratio_needs_in_mass():
    g = WeightedDigraph.from_edges(3, [(0, 1, 0.5), (1, 2, 0.5), (2, 1, 0.5)])
    with pytest.raises(ConversionError, match="zero weighted in-degree"):
        baseline_degree(g, "max_out_in_ratio")
    with pytest.raises(ParameterError, match="unknown degree baseline"):
        baseline_degree(g, "max_in")


def test_degree_baselines_score_candidate_subgraph(tail5):
    # Active {1, 2, 3}: degrees are taken inside the candidate subgraph, not
    # the parent graph.
    sv = detect(tail5, {1, 2, 3}, spec_for("max_out_deg"))
    assert sv.nodes.tolist() == [1, 2, 3]
    assert np.allclose(sv.scores, np.array([0.3, 0.6, 0.4]) / 1.3)
    assert sv.argmax_node == 2


# -- random guess ------------------------------------------------------------


def test_random_baseline_is_uniform(tail5):
    counts = np.zeros(4, dtype=int)
    first = detect(tail5, ALL_ACTIVE, spec_for("random", seed=0))
    assert np.array_equal(first.scores, detect(tail5, ALL_ACTIVE, spec_for("random", seed=0)).scores)
    for seed in range(10_000):
        sv = detect(tail5, ALL_ACTIVE, spec_for("random", seed=seed))
        assert sv.scores.sum() == 1.0 and (sv.scores == 1.0).sum() == 1
        counts[sv.argmax_index] += 1
    sigma = (10_000 * 0.25 * 0.75) ** 0.5
    assert np.abs(counts - 2500).max() < 5 * sigma


# -- influence-maximisation baseline -----------------------------------------


def exact_size_moments(g: WeightedDigraph, s: int) -> tuple[float, float]:
    """Mean and variance of the cascade size from ``s`` by subset enumeration."""
    edges = g.edge_list()
    m1 = m2 = 0.0
    for mask in range(1 << len(edges)):
        p_mask = 1.0
        adj: dict[int, list[int]] = {v: [] for v in range(g.n)}
        for k, (u, v, w) in enumerate(edges):
            if mask >> k & 1:
                p_mask *= w
                adj[u].append(v)
            else:
                p_mask *= 1.0 - w
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        m1 += p_mask * len(seen)
        m2 += p_mask * len(seen) ** 2
    return m1, m2 - m1 * m1


def test_im_baseline_matches_exact_mean_sizes(chord4):
    sims = 100_000
    sv = baseline_im(chord4, np.arange(4), sims, seed=5)
    stats = [exact_size_moments(chord4, s) for s in range(4)]
    means = np.array([m for m, _ in stats])
    # from_raw normalises; 4 sigma of the normalised estimate stays < 2e-3.
    assert np.abs(sv.scores - means / means.sum()).max() < 2e-3


def test_im_baseline_with_certain_edges():
    ring = WeightedDigraph.from_edges(
        3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]
    )
    sv = baseline_im(ring, np.arange(3), 50, seed=0)
    assert np.allclose(sv.scores, 1 / 3)  # everyone floods everything


def test_im_universe_modes_differ(tail5):
    active = {0, 1, 2, 3}
    on_active = detect(tail5, active, spec_for("im_based", im_simulations=400, seed=3))
    on_full = detect(
        tail5, active, spec_for("im_based", im_universe="full", im_simulations=400, seed=3)
    )
    assert on_active.nodes.tolist() == on_full.nodes.tolist() == [0, 1, 2, 3]
    # The full graph lets cascades spill into node 4, inflating every mean.
    assert not np.allclose(on_active.scores, on_full.scores)


# -- maximum-weight arborescence ---------------------------------------------


def test_max_arborescence_on_chord(chord4):
    logs = max_arborescence_log_weights(chord4)
    assert np.allclose(np.exp(logs), [0.018, 0.036, 0.048, 0.024], rtol=1e-12)
    sv = baseline_max_arborescence(chord4)
    best = np.array([0.018, 0.036, 0.048, 0.024])
    assert np.allclose(sv.scores, best / best.sum(), rtol=1e-12)
    assert sv.argmax_node == 2


def test_max_arborescence_matches_enumeration():
    rng = np.random.default_rng(83)
    finite = 0
    empty = 0
    for trial in range(150):
        g = random_digraph(rng, n=int(rng.integers(2, 8)), density=0.45)
        if trial % 5 == 0:  # exercise zero-cost (p = 1) edges too
            edges = [
                (u, v, 1.0 if k % 3 == 0 else w)
                for k, (u, v, w) in enumerate(g.edge_list())
            ]
            g = WeightedDigraph.from_edges(g.n, edges)
        logs = max_arborescence_log_weights(g)
        for r in range(g.n):
            weights = [w for _, w in enumerate_out_trees(g, r)]
            if weights:
                assert np.exp(logs[r]) == pytest.approx(max(weights), rel=1e-9)
                finite += 1
            else:
                assert logs[r] == -np.inf
                empty += 1
    assert finite > 150 and empty > 150


def test_max_arborescence_needs_one_viable_root():
    g = WeightedDigraph.from_edges(3, [(1, 2, 0.5)])
    with pytest.raises(ConversionError, match="no root"):
        baseline_max_arborescence(g)


def test_max_arborescence_never_exceeds_tree_sum():
    from icsource import gamma_exact

    rng = np.random.default_rng(84)
    for trial in range(40):
        g = random_digraph(rng, n=6, density=0.5)
        best = np.exp(max_arborescence_log_weights(g))
        assert (best <= gamma_exact(g) * (1 + 1e-9)).all()


# -- shared context caching --------------------------------------------------


def test_context_shares_solves(tail5):
    cs = candidate_set(tail5, ALL_ACTIVE)
    ctx = DetectionContext(tail5, cs)
    assert ctx.direct_pi("naive") is ctx.direct_pi("no_loops")
    assert ctx.chain("self_loops") is ctx.chain("self_loops")
    assert ctx.chain("naive") is not ctx.chain("no_loops")  # distinct records
    a = run_detector(ctx, DIRECT_SELF, seed=0)
    b = detect(tail5, ALL_ACTIVE, DIRECT_SELF)
    assert np.array_equal(a.scores, b.scores)
