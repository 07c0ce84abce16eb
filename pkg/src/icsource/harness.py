"""Experiment harness: trial sampling, detector comparison, report emission.

A trial samples (graph, source, cascade), filters degenerate cascades, and
runs every configured detector against the same candidate extraction.  All
randomness is derived from the master seed and the sample index, so a run is
bit-reproducible and independent of worker count.
"""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .candidates import candidate_set
from .cascade import simulate_ic
from .detectors import CHAIN_METHODS, DetectionContext, DetectorSpec, run_detector
from .errors import ParameterError
from .graph import (
    RandomGraphParams,
    WeightedDigraph,
    assign_weights,
    generate_random_graph,
    load_edge_list,
)
from .rng import derive_seed, keyed_u01

# purpose tags for per-sample seed derivation
_P_GRAPH = 1
_P_SOURCE = 2
_P_CASCADE = 3
_P_DETECTOR = 4
_P_WEIGHTS = 5

REJECT_TOO_SMALL = "too_small"
REJECT_SINGLETON = "singleton_candidates"


@dataclass(frozen=True)
class RandomGraphSource:
    """A fresh random graph per trial."""

    n: int
    density: float
    p_range: float


@dataclass(frozen=True)
class EdgeListSource:
    """One fixed graph loaded from an edge-list file.

    ``target_mean_wout`` triggers weight assignment (required when the file
    has no weights); the weight seed derives from the master seed.
    """

    path: str
    target_mean_wout: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    graph_source: RandomGraphSource | EdgeListSource
    detectors: tuple[DetectorSpec, ...]
    trials: int = 1000
    min_active: int = 20
    master_seed: int = 0
    sample_cap: int | None = None  # default: 500 * trials
    workers: int = 1
    output_dir: str | None = None
    formats: tuple[str, ...] = ("csv", "json")

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.min_active < 1:
            raise ParameterError("min_active must be >= 1")
        if not self.detectors:
            raise ParameterError("at least one detector is required")
        keys = [d.key() for d in self.detectors]
        if len(set(keys)) != len(keys):
            raise ParameterError(f"duplicate detector keys in {keys}")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        for f in self.formats:
            if f not in ("csv", "json"):
                raise ParameterError(f"unknown report format {f!r}")

    @property
    def effective_sample_cap(self) -> int:
        return self.sample_cap if self.sample_cap is not None else 500 * self.trials

    # -- JSON config ---------------------------------------------------------

    @classmethod
    def from_json(cls, text: str, *, base_dir: str | Path | None = None) -> "ExperimentConfig":
        raw = json.loads(text)
        if not isinstance(raw, dict):
            raise ParameterError("config must be a JSON object")
        gs_raw = raw.get("graph")
        if not isinstance(gs_raw, dict) or "type" not in gs_raw:
            raise ParameterError("config needs a 'graph' object with a 'type'")
        if gs_raw["type"] == "random":
            gs = RandomGraphSource(
                n=int(gs_raw["n"]),
                density=float(gs_raw["density"]),
                p_range=float(gs_raw["p_range"]),
            )
        elif gs_raw["type"] == "edge_list":
            path = str(gs_raw["path"])
            if base_dir is not None and not Path(path).is_absolute():
                path = str(Path(base_dir) / path)
            tm = gs_raw.get("target_mean_wout")
            gs = EdgeListSource(path, None if tm is None else float(tm))
        else:
            raise ParameterError(f"unknown graph type {gs_raw['type']!r}")
        dets = []
        for d in raw.get("detectors", []):
            kwargs = {"method": d["method"]}
            if "mode" in d:
                kwargs["stationary_mode"] = d["mode"]
            for k_json, k_field in (
                ("steps", "steps"),
                ("restarts", "restarts"),
                ("im_simulations", "im_simulations"),
                ("im_universe", "im_universe"),
            ):
                if k_json in d:
                    kwargs[k_field] = d[k_json]
            dets.append(DetectorSpec(**kwargs))
        kwargs = {}
        for k in ("trials", "min_active", "master_seed", "sample_cap", "workers"):
            if k in raw:
                kwargs[k] = int(raw[k])
        out = raw.get("output", {})
        return cls(
            graph_source=gs,
            detectors=tuple(dets),
            output_dir=out.get("dir"),
            formats=tuple(out.get("formats", ("csv", "json"))),
            **kwargs,
        )


@dataclass(frozen=True)
class DetectorOutcome:
    key: str
    predicted: int
    hit: bool
    wall_time: float  # seconds; in-memory only, never emitted


@dataclass(frozen=True)
class TrialRecord:
    sample_index: int
    cascade_seed: int
    graph_fingerprint: str
    source: int
    n_active: int
    n_candidates: int | None
    rejection: str | None
    outcomes: tuple[DetectorOutcome, ...]

    @property
    def is_valid(self) -> bool:
        return self.rejection is None


@dataclass(frozen=True)
class DetectorRow:
    """One summary row: a detector's identity broken into columns, plus hits.

    ``mode``/``steps`` are the chain-method knobs; baselines leave them
    empty.  ``key`` stays the single-string identifier used everywhere else.
    """

    key: str
    method: str
    mode: str  # "direct" | "random_walk" for chain methods, "" otherwise
    steps: int | None
    successes: int


def _detector_row(spec: DetectorSpec, successes: int) -> DetectorRow:
    chain = spec.method in CHAIN_METHODS
    mode = spec.stationary_mode if chain else ""
    steps = spec.steps if chain and spec.stationary_mode == "random_walk" else None
    return DetectorRow(spec.key(), spec.method, mode, steps, successes)


@dataclass(frozen=True)
class ResultsTable:
    """Aggregated run outcome; everything emit_report writes comes from here."""

    detector_rows: tuple[DetectorRow, ...]  # in config order
    valid_trials: int
    rejected_too_small: int
    rejected_singleton: int
    total_samples: int

    def successes(self, key: str) -> int:
        for row in self.detector_rows:
            if row.key == key:
                return row.successes
        raise KeyError(key)

    def to_dict(self) -> dict:
        return {
            "valid_trials": self.valid_trials,
            "rejected": {
                REJECT_TOO_SMALL: self.rejected_too_small,
                REJECT_SINGLETON: self.rejected_singleton,
            },
            "total_samples": self.total_samples,
            "detectors": [
                {
                    "key": r.key,
                    "method": r.method,
                    "mode": r.mode,
                    "steps": r.steps,
                    "successes": r.successes,
                    "trials": self.valid_trials,
                }
                for r in self.detector_rows
            ],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ResultsTable":
        return cls(
            detector_rows=tuple(
                DetectorRow(
                    d["key"], d["method"], d["mode"], d["steps"], int(d["successes"])
                )
                for d in raw["detectors"]
            ),
            valid_trials=int(raw["valid_trials"]),
            rejected_too_small=int(raw["rejected"][REJECT_TOO_SMALL]),
            rejected_singleton=int(raw["rejected"][REJECT_SINGLETON]),
            total_samples=int(raw["total_samples"]),
        )


# -- per-sample work ---------------------------------------------------------

_WORKER_CFG: ExperimentConfig | None = None
_WORKER_GRAPH: WeightedDigraph | None = None


def _load_fixed_graph(cfg: ExperimentConfig) -> WeightedDigraph | None:
    if not isinstance(cfg.graph_source, EdgeListSource):
        return None
    with open(cfg.graph_source.path, "r", encoding="utf-8") as fh:
        g = load_edge_list(fh)
    if cfg.graph_source.target_mean_wout is not None:
        g = assign_weights(
            g,
            cfg.graph_source.target_mean_wout,
            derive_seed(cfg.master_seed, _P_WEIGHTS),
        )
    else:
        g.require_weighted()
    return g


def _init_worker(cfg: ExperimentConfig) -> None:
    global _WORKER_CFG, _WORKER_GRAPH
    _WORKER_CFG = cfg
    _WORKER_GRAPH = _load_fixed_graph(cfg)


def _run_sample(cfg: ExperimentConfig, fixed: WeightedDigraph | None, s: int) -> TrialRecord:
    master = cfg.master_seed
    if fixed is not None:
        g = fixed
    else:
        gs = cfg.graph_source
        g = generate_random_graph(
            RandomGraphParams(gs.n, gs.density, gs.p_range, derive_seed(master, _P_GRAPH, s))
        )
    source = min(int(keyed_u01(master, _P_SOURCE, s) * g.n), g.n - 1)
    cascade_seed = derive_seed(master, _P_CASCADE, s)
    c = simulate_ic(g, source, cascade_seed)
    fp = g.fingerprint()
    if len(c.active) < cfg.min_active:
        return TrialRecord(s, cascade_seed, fp, source, len(c.active), None,
                           REJECT_TOO_SMALL, ())
    cs = candidate_set(g, c.active)
    if cs.is_singleton:
        return TrialRecord(s, cascade_seed, fp, source, len(c.active),
                           1, REJECT_SINGLETON, ())
    ctx = DetectionContext(g, cs)
    outcomes = []
    for d_idx, spec in enumerate(cfg.detectors):
        det_seed = derive_seed(master, _P_DETECTOR, s, d_idx)
        t0 = time.perf_counter()
        sv = run_detector(ctx, spec, det_seed)
        dt = time.perf_counter() - t0
        predicted = sv.argmax_node
        outcomes.append(
            DetectorOutcome(spec.key(), predicted, predicted == source, dt)
        )
    return TrialRecord(s, cascade_seed, fp, source, len(c.active),
                       len(cs.nodes), None, tuple(outcomes))


def _run_sample_in_worker(s: int) -> TrialRecord:
    assert _WORKER_CFG is not None
    return _run_sample(_WORKER_CFG, _WORKER_GRAPH, s)


# -- main loop ---------------------------------------------------------------

def run_experiment(cfg: ExperimentConfig) -> tuple[ResultsTable, list[TrialRecord]]:
    """Run until ``cfg.trials`` valid trials, returning the table and records.

    Samples are indexed 0, 1, 2, ...; the emitted records are exactly the
    samples up to and including the one that filled the quota, so the output
    is identical for any worker count.  Raises if the sample cap is hit first.
    """
    records: list[TrialRecord] = []
    valid = 0
    cap = cfg.effective_sample_cap

    def consume(rec: TrialRecord) -> bool:
        nonlocal valid
        records.append(rec)
        if rec.is_valid:
            valid += 1
            if valid >= cfg.trials:
                return True
        return False

    done = False
    if cfg.workers == 1:
        fixed = _load_fixed_graph(cfg)
        s = 0
        while not done and s < cap:
            done = consume(_run_sample(cfg, fixed, s))
            s += 1
    else:
        wave = cfg.workers * 8
        with ProcessPoolExecutor(
            max_workers=cfg.workers, initializer=_init_worker, initargs=(cfg,)
        ) as pool:
            s = 0
            while not done and s < cap:
                hi = min(s + wave, cap)
                for rec in pool.map(_run_sample_in_worker, range(s, hi)):
                    done = consume(rec)
                    if done:
                        break
                s = hi
    if not done:
        tallies = _tally(records)
        raise RuntimeError(
            f"sample cap {cap} reached with only {valid}/{cfg.trials} valid trials "
            f"(rejected: {tallies[REJECT_TOO_SMALL]} {REJECT_TOO_SMALL}, "
            f"{tallies[REJECT_SINGLETON]} {REJECT_SINGLETON}); "
            "the graph/cascade parameters rarely produce usable cascades"
        )
    table = _build_table(cfg, records)
    return table, records


def _tally(records: Sequence[TrialRecord]) -> dict[str, int]:
    out = {REJECT_TOO_SMALL: 0, REJECT_SINGLETON: 0}
    for r in records:
        if r.rejection is not None:
            out[r.rejection] += 1
    return out


def _build_table(cfg: ExperimentConfig, records: Sequence[TrialRecord]) -> ResultsTable:
    tallies = _tally(records)
    succ = {d.key(): 0 for d in cfg.detectors}
    valid = 0
    for r in records:
        if r.is_valid:
            valid += 1
            for o in r.outcomes:
                if o.hit:
                    succ[o.key] += 1
    return ResultsTable(
        detector_rows=tuple(_detector_row(d, succ[d.key()]) for d in cfg.detectors),
        valid_trials=valid,
        rejected_too_small=tallies[REJECT_TOO_SMALL],
        rejected_singleton=tallies[REJECT_SINGLETON],
        total_samples=len(records),
    )


# -- reports -----------------------------------------------------------------

def render_summary_csv(table: ResultsTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "mode", "steps", "successes", "trials"])
    for r in table.detector_rows:
        w.writerow(
            [r.method, r.mode, "" if r.steps is None else r.steps,
             r.successes, table.valid_trials]
        )
    w.writerow(["_rejected_too_small", "", "", table.rejected_too_small, ""])
    w.writerow(["_rejected_singleton", "", "", table.rejected_singleton, ""])
    w.writerow(["_total_samples", "", "", table.total_samples, ""])
    return buf.getvalue()


def render_trials_csv(cfg: ExperimentConfig, records: Sequence[TrialRecord]) -> str:
    keys = [d.key() for d in cfg.detectors]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["sample_index", "status", "graph", "cascade_seed", "source",
              "n_active", "n_candidates"]
    for k in keys:
        header += [f"{k}_pred", f"{k}_hit"]
    w.writerow(header)
    for r in records:
        row = [
            r.sample_index,
            "valid" if r.is_valid else r.rejection,
            r.graph_fingerprint,
            r.cascade_seed,
            r.source,
            r.n_active,
            "" if r.n_candidates is None else r.n_candidates,
        ]
        by_key = {o.key: o for o in r.outcomes}
        for k in keys:
            if k in by_key:
                row += [by_key[k].predicted, int(by_key[k].hit)]
            else:
                row += ["", ""]
        w.writerow(row)
    return buf.getvalue()


def render_summary_json(table: ResultsTable) -> str:
    return json.dumps(table.to_dict(), indent=2, sort_keys=True) + "\n"


def emit_report(
    cfg: ExperimentConfig,
    table: ResultsTable,
    records: Sequence[TrialRecord],
    out_dir: str | Path,
) -> list[Path]:
    """Write the configured report files; returns the paths written.

    Output bytes are a pure function of (config, results): wall times and
    any other nondeterministic observations never reach the files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in cfg.formats:
        p = out / "summary.csv"
        p.write_text(render_summary_csv(table), encoding="utf-8")
        written.append(p)
        p = out / "trials.csv"
        p.write_text(render_trials_csv(cfg, records), encoding="utf-8")
        written.append(p)
    if "json" in cfg.formats:
        p = out / "summary.json"
        p.write_text(render_summary_json(table), encoding="utf-8")
        written.append(p)
    return written
