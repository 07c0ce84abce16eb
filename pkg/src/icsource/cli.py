"""Command-line interface.

Exit codes: 0 success, 1 invalid input (bad parameters, malformed files), 2
internal/unexpected failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .detectors import CHAIN_METHODS, DetectorSpec, detect
from .errors import (
    CapacityError,
    ConversionError,
    EdgeListError,
    GraphStructureError,
    InconsistentCascadeError,
    ParameterError,
)
from .graph import WeightedDigraph, load_edge_list
from .harness import ExperimentConfig, emit_report, run_experiment
from .oracles import arborescence_weight_sum, brute_force_posterior, gamma_exact

_INPUT_ERRORS = (
    ParameterError,
    EdgeListError,
    GraphStructureError,
    CapacityError,
    ConversionError,
    InconsistentCascadeError,
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
)


def _load_graph(path: str) -> WeightedDigraph:
    with open(path, "r", encoding="utf-8") as fh:
        return load_edge_list(fh)


def _parse_active(spec: str, g: WeightedDigraph) -> list[int]:
    if spec.startswith("@"):
        names = Path(spec[1:]).read_text(encoding="utf-8").split()
    else:
        names = [tok for tok in spec.split(",") if tok]
    if not names:
        raise ParameterError("active set is empty")
    return g.resolve_nodes(names)


def _cmd_run(args: argparse.Namespace) -> int:
    text = Path(args.config).read_text(encoding="utf-8")
    cfg = ExperimentConfig.from_json(text, base_dir=Path(args.config).parent)
    if args.workers is not None:
        cfg = ExperimentConfig(
            graph_source=cfg.graph_source, detectors=cfg.detectors,
            trials=cfg.trials, min_active=cfg.min_active,
            master_seed=cfg.master_seed, sample_cap=cfg.sample_cap,
            workers=args.workers, output_dir=cfg.output_dir,
            formats=cfg.formats,
        )
    out_dir = args.output_dir or cfg.output_dir
    if out_dir is None:
        raise ParameterError("no output directory (config 'output.dir' or --output-dir)")
    table, records = run_experiment(cfg)
    paths = emit_report(cfg, table, records, out_dir)
    for row in table.detector_rows:
        print(f"{row.key}: {row.successes}/{table.valid_trials}")
    print(
        f"samples: {table.total_samples} "
        f"(rejected {table.rejected_too_small} too_small, "
        f"{table.rejected_singleton} singleton_candidates)"
    )
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_detect(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    active = _parse_active(args.active, g)
    kwargs = {"method": args.method, "seed": args.seed}
    if args.steps is not None:
        if args.method not in CHAIN_METHODS:
            raise ParameterError(f"--steps only applies to {', '.join(CHAIN_METHODS)}")
        kwargs["stationary_mode"] = "random_walk"
        kwargs["steps"] = args.steps
    sv = detect(g, active, DetectorSpec(**kwargs))
    for node, score in zip(sv.nodes, sv.scores):
        print(f"{g.label_of(int(node))} {score:.12g}")
    print(f"argmax {g.label_of(sv.argmax_node)}")
    if sv.tree_fallback:
        print("note: reducible chain; scores from tree-weight fallback")
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    if args.brute_force:
        post = brute_force_posterior(g)
        for v in range(g.n):
            print(f"{g.label_of(v)} {post.joint[v]:.12g} {post.posterior[v]:.12g}")
    elif args.gamma:
        gam = gamma_exact(g)
        for v in range(g.n):
            print(f"{g.label_of(v)} {gam[v]:.12g}")
    else:
        (root_id,) = g.resolve_nodes([args.root])
        value = arborescence_weight_sum(g, root_id, args.direction)
        print(f"{value:.12g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icsource",
        description="Identify the source of an independent-cascade diffusion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment")
    p_run.add_argument("--config", required=True, help="experiment config JSON")
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument("--output-dir", default=None)
    p_run.set_defaults(func=_cmd_run)

    p_det = sub.add_parser("detect", help="score candidate sources of an active set")
    p_det.add_argument("--graph", required=True, help="edge-list file")
    p_det.add_argument(
        "--active", required=True,
        help="comma-separated node labels, or @file with whitespace-separated labels",
    )
    p_det.add_argument("--method", required=True)
    p_det.add_argument("--steps", type=int, default=None,
                       help="random-walk steps (switches chain methods to walk mode)")
    p_det.add_argument("--seed", type=int, default=0)
    p_det.set_defaults(func=_cmd_detect)

    p_or = sub.add_parser("oracle", help="exact reference computations")
    p_or.add_argument("--graph", required=True, help="edge-list file")
    mode = p_or.add_mutually_exclusive_group(required=True)
    mode.add_argument("--brute-force", action="store_true",
                      help="exact posterior over all edge subsets")
    mode.add_argument("--gamma", action="store_true",
                      help="per-root spanning out-tree weight sums (enumeration)")
    mode.add_argument("--matrix-tree", action="store_true",
                      help="tree weight sum for --root via Laplacian minor")
    p_or.add_argument("--root", default=None)
    p_or.add_argument("--direction", choices=("in", "out"), default="out")
    p_or.set_defaults(func=_cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "matrix_tree", False) and args.root is None:
            parser.error("--matrix-tree requires --root")
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are invalid input here
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
