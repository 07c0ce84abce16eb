"""Source detection for independent-cascade diffusions on weighted digraphs.

Convert the infected subgraph into a Markov chain whose stationary
distribution ranks candidate sources, and compare against exact oracles and
simpler baselines.
"""
from __future__ import annotations

from .backend import backend_name
from .candidates import CandidateSet, candidate_set
from .cascade import Cascade, activation_tree_weight, simulate_ic, validate_cascade
from .chain import (
    MarkovChain,
    convert_naive,
    convert_no_loops,
    convert_self_loops,
    dump_chain,
)
from .detectors import (
    BASELINE_METHODS,
    CHAIN_METHODS,
    METHODS,
    DetectorSpec,
    baseline_degree,
    baseline_im,
    baseline_max_arborescence,
    detect,
    max_arborescence_log_weights,
)
from .errors import (
    CapacityError,
    ConversionError,
    EdgeListError,
    GraphStructureError,
    InconsistentCascadeError,
    NumericalError,
    ParameterError,
    ReducibleChainError,
)
from .graph import (
    RandomGraphParams,
    WeightedDigraph,
    assign_weights,
    dump_edge_list,
    generate_random_graph,
    load_edge_list,
)
from .harness import (
    DetectorRow,
    EdgeListSource,
    ExperimentConfig,
    RandomGraphSource,
    ResultsTable,
    TrialRecord,
    emit_report,
    render_summary_csv,
    render_summary_json,
    render_trials_csv,
    run_experiment,
)
from .oracles import (
    ExactPosterior,
    arborescence_weight_sum,
    brute_force_posterior,
    enumerate_out_trees,
    gamma_exact,
    tree_sum_log_weights,
)
from .stationary import (
    Distribution,
    ScoreVector,
    score_no_loops,
    score_self_loops,
    scores_from_stationary,
    stationary_direct,
    stationary_random_walk,
    tree_weight_stationary,
)

__version__ = "0.1.0"
