from __future__ import annotations

import json
import subprocess
import sys

import pytest

from tapaug.cli import main

from conftest import DANGEROUS_ONE, FIXTURE_1, FIXTURE_2


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (("one", FIXTURE_1), ("two", FIXTURE_2), ("danger", DANGEROUS_ONE),
                       ("bad", "tap 1\nnodes 3\nroot 0\nedge 0 1\nedge 1 0\n")):
        p = tmp_path / f"{name}.tap"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_deterministic(capsys):
    a = run(capsys, "gen", "--n", "8", "--density", "1/4", "--seed", "7")
    b = run(capsys, "gen", "--n", "8", "--density", "1/4", "--seed", "7")
    assert a == b and a[0] == 0
    assert a[1].startswith("tap 1\nnodes 8\n")
    assert run(capsys, "gen", "--n", "1")[0] == 2


def test_solve(capsys, files):
    code, out, _ = run(capsys, "solve", files["two"])
    assert code == 0
    assert out.splitlines()[0] == "size 2"
    code, out, _ = run(capsys, "--json", "solve", files["two"])
    data = json.loads(out)
    assert data["size"] == 2 and data["steps"] == ["semi-closed", "semi-closed"]


def test_solve_audit_and_trace(capsys, files, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, out, _ = run(capsys, "solve", files["danger"], "--audit", "--trace", str(trace))
    assert code == 0
    assert "audit ok" in out and "find-tree" in out
    assert len(trace.read_text().splitlines()) == 2


def test_audit_json(capsys, files):
    code, out, _ = run(capsys, "audit", files["two"], "--json")
    data = json.loads(out)
    assert code == 0 and data["audit_ok"]
    assert data["tau"] == "2/1" and data["bound"] == "11/4"
    assert [s["tokens"] for s in data["steps_audit"]] == ["9/4", "5/2"]


def test_emit_dot(capsys, files, tmp_path):
    out_dir = tmp_path / "dots"
    assert run(capsys, "--emit-dot", str(out_dir), "solve", files["two"])[0] == 0
    dots = sorted(out_dir.iterdir())
    assert len(dots) >= 2 and dots[0].read_text().startswith("graph TI {")


def test_leafcover(capsys, files):
    code, out, _ = run(capsys, "leafcover", files["two"])
    assert code == 0 and out.splitlines() == ["weight 9/4", "link 2 3 9/4"]
    code, out, _ = run(capsys, "--rho", "3/2", "--json", "leafcover", files["two"])
    assert json.loads(out)["weight"] == "2/1"


def test_rho_validation(capsys, files):
    code, _, err = run(capsys, "--rho", "4/3", "solve", files["two"])
    assert code == 2 and "3/2" in err
    assert run(capsys, "solve", files["two"], "--rho", "abc")[0] == 2


def test_bound(capsys, files):
    code, out, _ = run(capsys, "bound", files["two"])
    assert code == 0 and out.splitlines()[:2] == ["tau 2/1", "cut 2/1"]
    code, out, _ = run(capsys, "bound", files["two"], "--lp-format", "text")
    assert out.startswith("minimize ")
    assert sum(1 for line in out.splitlines() if line.startswith("[cut")) == 3


def test_exact(capsys, files):
    code, out, _ = run(capsys, "exact", files["two"])
    assert code == 0
    assert json.loads(out) == {"opt": 2, "witness": [[0, 2], [2, 3]]}


def test_bad_input(capsys, files, tmp_path):
    code, _, err = run(capsys, "solve", files["bad"])
    assert code == 2 and "duplicate edge" in err
    assert run(capsys, "solve", str(tmp_path / "missing.tap"))[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_stress_json(capsys):
    code, out, _ = run(capsys, "stress", "--count", "5", "--seed", "1", "--json")
    data = json.loads(out)
    assert code == 0
    assert set(data) == {"instances", "max_ratio_opt", "max_ratio_tau", "failures"}
    assert data["instances"] == 5 and data["failures"] == []


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "tapaug", "solve", files["one"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("size 1")
