"""CLI: artifact round-trips, determinism, exit codes."""

import json
import subprocess
import sys

from cubic_sudoku import graph_core as gc
from cubic_sudoku.cli import main


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_roundtrip(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, stdout, _ = run_cli(["gen", "--n", "100", "--seed", "7", "--out", str(out)], capsys)
    assert code == 0
    summary = json.loads(stdout)
    assert summary["n"] == 100
    g = gc.load_graph(str(out))
    assert g.n == 100


def test_gen_rejects_odd_n(capsys):
    code, _, stderr = run_cli(["gen", "--n", "101", "--seed", "0"], capsys)
    assert code == 2
    assert "error" in stderr


def test_unknown_subcommand_exit_2(capsys):
    assert run_cli(["nonsense"], capsys)[0] == 2


def test_pipeline_outputs_byte_identical(tmp_path, capsys):
    paths = {name: tmp_path / name for name in
             ("r.json", "g.json", "c.json", "s.json", "t.csv")}
    args = ["pipeline", "--n", "2000", "--seed", "1",
            "--out", str(paths["r.json"]), "--graph", str(paths["g.json"]),
            "--colouring", str(paths["c.json"]), "--set", str(paths["s.json"]),
            "--trajectory", str(paths["t.csv"])]
    code, out1, _ = run_cli(args, capsys)
    assert code == 0
    blobs = {name: p.read_bytes() for name, p in paths.items()}
    code, out2, _ = run_cli(args, capsys)
    assert code == 0
    assert out1 == out2
    for name, p in paths.items():
        assert p.read_bytes() == blobs[name], f"{name} not reproducible"


def test_pipeline_then_verify_unique(tmp_path, capsys):
    g, c, s = (str(tmp_path / x) for x in ("g.json", "c.json", "s.json"))
    code, _, _ = run_cli(["pipeline", "--n", "1500", "--seed", "3",
                          "--graph", g, "--colouring", c, "--set", s], capsys)
    assert code == 0
    code, stdout, _ = run_cli(["verify", "--graph", g, "--colouring", c, "--set", s], capsys)
    assert code == 0
    assert json.loads(stdout)["status"].startswith("Unique")


def test_verify_rejects_insufficient_set(tmp_path, capsys):
    g, c, s = (str(tmp_path / x) for x in ("g.json", "c.json", "s.json"))
    run_cli(["pipeline", "--n", "1500", "--seed", "3",
             "--graph", g, "--colouring", c, "--set", s], capsys)
    (tmp_path / "s.json").write_text(json.dumps({"version": "set-v1", "vertices": [1]}))
    code, stdout, _ = run_cli(["verify", "--graph", g, "--colouring", c, "--set", s], capsys)
    assert code == 1
    assert json.loads(stdout)["status"] in ("NotUnique", "Unknown")


def test_min_sudoku_on_small_graph(tmp_path, capsys):
    path = tmp_path / "k4.json"
    payload = {"version": "adj-v1", "n": 4,
               "edges": [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]]}
    path.write_text(json.dumps(payload))
    code, stdout, _ = run_cli(["min-sudoku", "--graph", str(path), "--colours", "4"], capsys)
    assert code == 0
    assert json.loads(stdout)["size"] == 3


def test_chain_summary_keys(capsys):
    code, stdout, _ = run_cli(["chain", "--q1", "0.1", "--q2", "0.15", "--q3", "0.12"], capsys)
    assert code == 0
    payload = json.loads(stdout)
    for key in ("params", "pi", "t_mix", "alpha", "kappa", "c_cond"):
        assert key in payload
    assert len(payload["pi"]) == 18


def test_sweep_and_trajectory_commands(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, stdout, _ = run_cli(["sweep", "--ns", "600", "--trials", "2",
                               "--out", str(out)], capsys)
    assert code == 0
    assert out.read_text().startswith("n,trials,")
    traj = tmp_path / "traj.csv"
    code, stdout, _ = run_cli(["trajectory", "--n", "2000", "--seed", "2",
                               "--out", str(traj)], capsys)
    assert code == 0
    assert traj.read_text().startswith("step,X,X1,X2,X3,S_size,bc,buc,bud")
    svg = tmp_path / "traj.svg"
    assert svg.exists() and svg.read_text().startswith("<svg")


def test_probe_command(capsys):
    code, stdout, _ = run_cli(["probe", "--n", "40", "--trials", "2",
                               "--budget", "30", "--seed", "2"], capsys)
    assert code == 0
    payload = json.loads(stdout)
    assert payload["attempts"] <= 30


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cubic_sudoku.cli",
                           "gen", "--n", "50", "--seed", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 50
