import json
from pathlib import Path

import numpy as np
import pytest

from stabgrid.cli import COMMANDS, run

GOLDEN = Path(__file__).parent / "golden"


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv,name", [
    (["score", "--lattice", "grid:2x3", "--set", "canonical"], "score"),
    (["optimize", "--lattice", "grid:2x2"], "optimize"),
    (["hctf", "--lattice", "grid:3x3", "--method", "kernel"], "hctf"),
    (["plan", "--lattice", "path:3"], "plan"),
    (["lattice", "--lattice", "path:3"], "lattice"),
    (["canonical", "--lattice", "path:3"], "canonical"),
])
def test_json_matches_golden(capsys, argv, name):
    code, out, _ = _run(capsys, *argv, "--format", "json")
    assert code == 0
    assert json.loads(out) == json.loads((GOLDEN / f"{name}.json").read_text())


def test_score_canonical_3x3(capsys):
    code, out, _ = _run(capsys, "score", "--lattice", "grid:3x3", "--set", "canonical")
    assert code == 0
    assert out.strip().endswith("total 24")


def test_hctf_kernel_prints_three_patterns(capsys):
    code, out, _ = _run(capsys, "hctf", "--lattice", "grid:3x3", "--method", "kernel")
    assert code == 0
    assert out.startswith("3 HCTF pattern(s)")
    assert out.count("# pattern") == 3


def test_optimize_single_site(capsys):
    code, out, _ = _run(capsys, "optimize", "--lattice", "grid:1x1", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["total_penalty"] == 0
    assert [o["text"] for o in doc["operators"]] == ["+X"]


def test_hctf_methods(capsys):
    code, out, _ = _run(capsys, "hctf", "--lattice", "grid:3x3", "--method", "propagate", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert [p["member"] for p in doc["patterns"]] == ["100010001", "010101010", "001010100"]
    code, out, _ = _run(capsys, "hctf", "--lattice", "triangle:5", "--method", "triangle", "--format", "json")
    assert json.loads(out)["count"] == 3
    code, out, _ = _run(capsys, "hctf", "--lattice", "grid:3x7", "--method", "tiling", "--initial", "100",
                        "--tile", "1x2", "--format", "json")
    assert code == 0
    assert json.loads(out)["patterns"][0]["ascii"] == ["X . . . . . X", ". X . . . X .", ". . X . X . ."]


def test_pipeline_round_trip(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    assert _run(capsys, "plan", "--lattice", "grid:3x3", "--set", "optimized", "--out", str(plan))[0] == 0
    doc = json.loads(plan.read_text())
    assert len(doc["patterns"]) == 3 and doc["pattern_total"] == 15

    # the plan file doubles as a set file for score
    code, out, _ = _run(capsys, "score", "--set", f"file:{plan}")
    assert code == 0 and out.strip().endswith("total 13")

    run_dir = tmp_path / "run"
    code, _, _ = _run(capsys, "simulate", "--plan", str(plan), "--shots", "2000", "--seed", "3",
                      "--out", str(run_dir))
    assert code == 0
    code, out, _ = _run(capsys, "estimate", "--run", str(run_dir / "run.json"), "--format", "json")
    assert code == 0
    assert json.loads(out)["fidelity_bound"] == 1.0


def test_simulate_is_seed_reproducible(tmp_path, capsys):
    dirs = []
    for name in ("a", "b"):
        d = tmp_path / name
        assert _run(capsys, "simulate", "--lattice", "grid:3x3", "--order", "checkerboard", "--shots", "500",
                    "--p-flip", "0.1", "--p-vacancy", "0.05", "--seed", "9", "--out", str(d))[0] == 0
        dirs.append(d)
    for f in ("pattern_0.bin", "pattern_1.bin"):
        assert (dirs[0] / f).read_bytes() == (dirs[1] / f).read_bytes()
    assert (dirs[0] / "pattern_0.bin").stat().st_size == 500 * 9


def test_simulate_csv_and_vacancy_override(tmp_path, capsys):
    d = tmp_path / "run"
    assert _run(capsys, "simulate", "--lattice", "grid:3x3", "--set", "hctf", "--shots", "50", "--p-vacancy", "1",
                "--format", "csv", "--out", str(d))[0] == 0
    rows = (d / "pattern_0.csv").read_text().strip().split("\n")
    assert len(rows) == 50 and rows[0] == ",".join(["0"] * 9)
    _, out, _ = _run(capsys, "estimate", "--run", str(d / "run.json"), "--vacancy-policy", "plus",
                     "--format", "json")
    assert all(e["mean"] == 1.0 for e in json.loads(out)["per_stabilizer"])


def test_render_formats(tmp_path, capsys):
    code, out, _ = _run(capsys, "render", "--lattice", "grid:2x2", "--set", "canonical")
    assert code == 0 and "X Z\nZ ." in out
    code, out, _ = _run(capsys, "render", "--lattice", "path:3", "--format", "dot")
    assert out.startswith("graph view0 {")
    svg = tmp_path / "p.svg"
    assert _run(capsys, "render", "--lattice", "grid:2x2", "--format", "svg", "--out", str(svg))[0] == 0
    assert svg.read_text().startswith("<svg")


def test_lattice_file_round_trip(tmp_path, capsys):
    f = tmp_path / "lat.json"
    w = np.zeros((3, 3))
    w[0, 1] = w[1, 0] = 0.5
    w[1, 2] = w[2, 1] = 1.0
    f.write_text(json.dumps({"shape": "custom", "weights": w.tolist()}))
    code, out, _ = _run(capsys, "score", "--lattice", f"file:{f}", "--set", "canonical", "--format", "json")
    assert code == 0
    assert json.loads(out)["penalty"]["total"] == 2.5


@pytest.mark.parametrize("argv", [
    ["score", "--bogus"],
    ["frobnicate"],
    [],
    ["optimize", "--lattice", "grid:2x2", "--method", "magic"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(argv) == 2


@pytest.mark.parametrize("argv,needle", [
    (["score", "--lattice", "grid:0x3"], "grid"),
    (["score"], "--lattice"),
    (["optimize", "--lattice", "grid:5x5", "--method", "exact"], "heuristic"),
    (["hctf", "--lattice", "grid:3x3", "--method", "triangle"], "triangle"),
    (["score", "--lattice", "grid:2x2", "--set", "file:/nonexistent.json"], "nonexistent"),
    (["estimate"], "--run"),
])
def test_domain_errors_exit_1(capsys, argv, needle):
    code, _, err = _run(capsys, *argv)
    assert code == 1
    assert "error:" in err and needle in err


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_every_subcommand_has_help(capsys, name):
    assert run([name, "--help"]) == 0
    assert "usage: stabgrid " + name in capsys.readouterr().out


def test_threads_env_default(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("STABGRID_THREADS", "3")
    from stabgrid.cli import build_parser
    assert build_parser().parse_args(["score"]).threads == 3
