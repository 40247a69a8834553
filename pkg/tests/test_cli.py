import csv
import json
import subprocess
import sys

import pytest

from conftest import DESK_LAMBDA_STAR, negative_weight_problem
from minkowski_neumann import desk_problem, save_problem
from minkowski_neumann.cli import main, parse_lambda_grid


@pytest.fixture
def cfg(tmp_path):
    def make(problem, name="p.json"):
        path = tmp_path / name
        save_problem(problem, path)
        return str(path)
    return make


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    out = tmp_path_factory.mktemp("solve")
    path = out / "p.json"
    save_problem(desk_problem(2 * DESK_LAMBDA_STAR), path)
    code = main(["solve", "--problem", str(path), "--out", str(out / "res"), "--grid", "1000"])
    return code, path, out / "res"


def test_parse_lambda_grid():
    assert list(parse_lambda_grid("1:3:3")) == [1.0, 2.0, 3.0]
    assert list(parse_lambda_grid("5:9:1")) == [5.0]


def test_constants_without_sweeps(cfg, tmp_path):
    code = main(["constants", "--problem", cfg(desk_problem()), "--out", str(tmp_path / "c"),
                 "--no-empirical"])
    assert code == 0
    data = json.loads((tmp_path / "c" / "constants.json").read_text())
    assert data["lambda_star"] == pytest.approx(DESK_LAMBDA_STAR, rel=1e-9)
    assert data["d_star"] is None


def test_hypothesis_violation_exit(cfg, tmp_path):
    assert main(["constants", "--problem", cfg(negative_weight_problem()),
                 "--out", str(tmp_path)]) == 2
    assert main(["solve", "--problem", cfg(negative_weight_problem()),
                 "--out", str(tmp_path)]) == 2


def test_io_and_usage_exits(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", "--problem", str(bad)]) == 4
    assert main(["solve", "--problem", str(tmp_path / "missing.json")]) == 4
    assert main(["solve"]) == 4
    assert main(["solve", "--problem", str(bad), "--grid", "2"]) == 4
    with pytest.raises(SystemExit) as exc:
        main(["explode"])
    assert exc.value.code == 4


def test_solve_outputs(solved):
    code, _, res = solved
    assert code == 0
    summary = json.loads((res / "summary.json").read_text())
    assert summary["status"] == "ok" and summary["n_solutions"] >= 2
    assert summary["norms"][0] < summary["delta_star"] < summary["norms"][-1]
    for name in ("small", "large"):
        cert = json.loads((res / f"certificate_{name}.json").read_text())
        assert cert["overall"]


def test_multiplicity_exit(cfg, tmp_path):
    out = tmp_path / "low"
    assert main(["solve", "--problem", cfg(desk_problem(0.05)), "--out", str(out)]) == 3
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "multiplicity not found"
    assert len(summary["attempts"]) > 0


def test_verify_round_trip(solved, tmp_path, capsys):
    _, problem, res = solved
    assert main(["verify", "--problem", str(problem), "--profile", str(res / "u_large.csv")]) == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["overall"]
    # a profile of the wrong problem fails certification
    other = tmp_path / "other.json"
    save_problem(desk_problem(DESK_LAMBDA_STAR), other)
    assert main(["verify", "--problem", str(other), "--profile", str(res / "u_large.csv"),
                 "--out", str(tmp_path / "v")]) == 1
    assert (tmp_path / "v" / "certificate.json").exists()


def test_sweep(cfg, tmp_path):
    p = cfg(desk_problem())
    out = tmp_path / "s"
    lam = 2 * DESK_LAMBDA_STAR
    assert main(["sweep", "--problem", p, "--out", str(out), "--lambda-grid", f"{lam}:{lam}:1",
                 "--grid", "1000"]) == 0
    rows = list(csv.reader(open(out / "sweep.csv")))
    assert rows[0][:2] == ["lambda", "n_solutions"]
    assert len(rows) == 2 and int(rows[1][1]) >= 2
    assert main(["sweep", "--problem", p, "--lambda-grid", "1:2:0"]) == 4
    assert main(["sweep", "--problem", p, "--lambda-grid", "2:1:3"]) == 4
    assert main(["sweep", "--problem", p, "--lambda-grid", "banana"]) == 4


@pytest.mark.slow
def test_figure1_is_deterministic(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"f{k}"
        proc = subprocess.run([sys.executable, "-m", "minkowski_neumann", "figure1", "--out", str(out),
                               "--seed", "3"], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert "weight zeros" in proc.stdout
        outs.append(out)
    for name in ("u_small.csv", "u_large.csv", "weight.csv", "constants.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    summary = json.loads((outs[0] / "summary.json").read_text())
    assert summary["sharp_cornered"] and summary["seed"] == 3
    assert len(summary["weight_zeros"]) == 4
