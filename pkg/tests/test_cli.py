"""Command-line interface, exercised in process through ``main(argv)``."""
import json

import pytest

from icsource import ExperimentConfig, run_experiment
from icsource import render_summary_csv, render_summary_json, render_trials_csv
from icsource.cli import main

CHORD4_TEXT = "0 1 0.1\n1 2 0.3\n2 3 0.6\n3 0 0.2\n3 1 0.4\n"


@pytest.fixture()
def chord4_file(tmp_path):
    path = tmp_path / "chord4.edges"
    path.write_text(CHORD4_TEXT)
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- detect ------------------------------------------------------------------


def test_detect_prints_scores_and_argmax(capsys, chord4_file):
    code, out, err = run_cli(
        capsys, "detect", "--graph", chord4_file, "--active", "0,1,2,3",
        "--method", "self_loops",
    )
    assert code == 0 and err == ""
    assert out.splitlines() == [
        "0 0.125",
        "1 0.25",
        "2 0.416666666667",
        "3 0.208333333333",
        "argmax 2",
    ]


def test_detect_reads_active_set_from_file(capsys, tmp_path, chord4_file):
    listing = tmp_path / "active.txt"
    listing.write_text("0 1\n2 3\n")
    code, out, _ = run_cli(
        capsys, "detect", "--graph", chord4_file, "--active", f"@{listing}",
        "--method", "no_loops",
    )
    assert code == 0
    assert out.splitlines()[-1] == "argmax 2"


def test_detect_walk_mode_via_steps(capsys, chord4_file):
    code, out, _ = run_cli(
        capsys, "detect", "--graph", chord4_file, "--active", "0,1,2,3",
        "--method", "self_loops", "--steps", "20000", "--seed", "7",
    )
    assert code == 0
    scores = [float(ln.split()[1]) for ln in out.splitlines()[:-1]]
    assert sum(scores) == pytest.approx(1.0)
    assert abs(scores[2] - 5 / 12) < 0.05


def test_detect_prints_node_labels(capsys, tmp_path):
    path = tmp_path / "lettered.edges"
    path.write_text("a b 0.5\nb a 0.5\nb c 0.5\nc b 0.5\n")
    code, out, _ = run_cli(
        capsys, "detect", "--graph", str(path), "--active", "a,b,c",
        "--method", "max_out_deg",
    )
    assert code == 0
    lines = out.splitlines()
    assert [ln.split()[0] for ln in lines[:-1]] == ["a", "b", "c"]
    assert lines[-1] == "argmax b"


def test_detect_rejects_bad_inputs(capsys, tmp_path, chord4_file):
    code, _, err = run_cli(
        capsys, "detect", "--graph", str(tmp_path / "missing.edges"),
        "--active", "0", "--method", "random",
    )
    assert code == 1 and "error:" in err

    bad = tmp_path / "bad.edges"
    bad.write_text("0 1 0.5\n1 2 5.0\n")
    code, _, err = run_cli(
        capsys, "detect", "--graph", str(bad), "--active", "0", "--method", "random"
    )
    assert code == 1 and "line 2" in err

    code, _, err = run_cli(
        capsys, "detect", "--graph", chord4_file, "--active", "0,1,2,3",
        "--method", "psychic",
    )
    assert code == 1 and "unknown method" in err

    code, _, err = run_cli(
        capsys, "detect", "--graph", chord4_file, "--active", "0,1,2,3",
        "--method", "random", "--steps", "100",
    )
    assert code == 1 and "--steps" in err

    code, _, err = run_cli(
        capsys, "detect", "--graph", chord4_file, "--active", "7",
        "--method", "random",
    )
    assert code == 1 and "unknown node" in err


# -- oracle ------------------------------------------------------------------


def test_oracle_brute_force(capsys, chord4_file):
    code, out, _ = run_cli(capsys, "oracle", "--graph", chord4_file, "--brute-force")
    assert code == 0
    rows = [ln.split() for ln in out.splitlines()]
    assert [r[0] for r in rows] == ["0", "1", "2", "3"]
    assert [float(r[1]) for r in rows] == pytest.approx([0.018, 0.036, 0.0552, 0.0276])
    assert [float(r[2]) for r in rows] == pytest.approx(
        [0.018 / 0.1368, 0.036 / 0.1368, 0.0552 / 0.1368, 0.0276 / 0.1368]
    )


def test_oracle_gamma(capsys, chord4_file):
    code, out, _ = run_cli(capsys, "oracle", "--graph", chord4_file, "--gamma")
    assert code == 0
    values = [float(ln.split()[1]) for ln in out.splitlines()]
    assert values == pytest.approx([0.018, 0.036, 0.06, 0.03])


def test_oracle_matrix_tree(capsys, chord4_file):
    code, out, _ = run_cli(
        capsys, "oracle", "--graph", chord4_file, "--matrix-tree", "--root", "2"
    )
    assert code == 0
    assert float(out.strip()) == pytest.approx(0.06)
    code, out, _ = run_cli(
        capsys, "oracle", "--graph", chord4_file, "--matrix-tree", "--root", "2",
        "--direction", "in",
    )
    assert code == 0
    # In-trees converging on 2: both 4-cycles contribute (0->1->2, 3->...).
    assert float(out.strip()) > 0


def test_oracle_matrix_tree_needs_root(capsys, chord4_file):
    code, _, err = run_cli(capsys, "oracle", "--graph", chord4_file, "--matrix-tree")
    assert code == 1


def test_oracle_capacity_error_is_invalid_input(capsys, tmp_path):
    path = tmp_path / "big.edges"
    n = 8
    path.write_text(
        "".join(
            f"{i} {j} 0.5\n" for i in range(n) for j in range(n) if i != j
        )
    )
    code, _, err = run_cli(capsys, "oracle", "--graph", str(path), "--brute-force")
    assert code == 1 and "error:" in err


# -- run ---------------------------------------------------------------------


def write_run_config(tmp_path) -> str:
    (tmp_path / "ring.edges").write_text(
        "".join(f"{i} {(i + 1) % 6} 1\n" for i in range(6))
    )
    cfg_path = tmp_path / "experiment.json"
    cfg_path.write_text(
        json.dumps(
            {
                "graph": {"type": "edge_list", "path": "ring.edges"},
                "detectors": [{"method": "self_loops"}, {"method": "random"}],
                "trials": 3,
                "min_active": 6,
                "master_seed": 4,
                "output": {"formats": ["csv", "json"]},
            }
        )
    )
    return str(cfg_path)


def test_run_writes_reports_matching_api(capsys, tmp_path):
    cfg_path = write_run_config(tmp_path)
    out_dir = tmp_path / "out"
    code, out, _ = run_cli(
        capsys, "run", "--config", cfg_path, "--output-dir", str(out_dir)
    )
    assert code == 0
    assert "self_loops: " in out and "samples: 3" in out
    assert sum(ln.startswith("wrote ") for ln in out.splitlines()) == 3

    cfg = ExperimentConfig.from_json(
        (tmp_path / "experiment.json").read_text(), base_dir=tmp_path
    )
    table, records = run_experiment(cfg)
    assert (out_dir / "summary.csv").read_text() == render_summary_csv(table)
    assert (out_dir / "trials.csv").read_text() == render_trials_csv(cfg, records)
    assert (out_dir / "summary.json").read_text() == render_summary_json(table)


def test_run_workers_flag_changes_nothing(capsys, tmp_path):
    cfg_path = write_run_config(tmp_path)
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    assert run_cli(capsys, "run", "--config", cfg_path, "--output-dir", str(a_dir))[0] == 0
    assert (
        run_cli(
            capsys, "run", "--config", cfg_path, "--output-dir", str(b_dir),
            "--workers", "2",
        )[0]
        == 0
    )
    for name in ("summary.csv", "trials.csv", "summary.json"):
        assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()


def test_run_requires_an_output_dir(capsys, tmp_path):
    cfg_path = write_run_config(tmp_path)
    code, _, err = run_cli(capsys, "run", "--config", cfg_path)
    assert code == 1 and "output directory" in err


# -- parser plumbing ---------------------------------------------------------


def test_help_exits_zero(capsys):
    assert run_cli(capsys, "--help")[0] == 0
    assert run_cli(capsys, "detect", "--help")[0] == 0


def test_usage_errors_exit_one(capsys):
    assert run_cli(capsys, "frobnicate")[0] == 1
    assert run_cli(capsys, "detect", "--graph")[0] == 1
    assert run_cli(capsys)[0] == 1
