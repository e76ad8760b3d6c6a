import json
import subprocess
import sys
from pathlib import Path

import pytest

from outerfp.cli import main, run

DATA = Path(__file__).resolve().parent.parent / "data"


def g(name):
    return str(DATA / name)


def test_tlen():
    code, rep = run(["tlen", "--graph", g("thistle23.json"), "--word", "v1.g1*v2.g1"])
    assert code == 0 and rep["length"] == "2"
    code, rep = run(["tlen", "--graph", g("thistle23.json"), "--word", "v1.g1*v2.g1", "--radius", "4"])
    assert code == 0 and rep["oracle_length"] == "2"
    code, rep = run(["tlen", "--graph", g("thistle23.json"), "--word", "v1.g1*v2.g1*v1.g1*v2.g2", "--radius", "1"])
    assert code == 2 and rep["oracle_length"] is None


def test_certify_unique():
    code, rep = run(["certify-unique", "--graph", g("thistle222.json"), "--auto", g("cyclic.json")])
    assert code == 0
    assert rep["displacement"] == "1"
    assert rep["argmin"] == ["1/3", "1/3", "1/3"]
    assert rep["unique_center"] is True
    assert rep["edge_cycle"] == "(e1 e2 e3)"


def test_validate_exit_codes():
    assert run(["validate", "--graph", g("free_degree2.json")])[0] == 1
    assert run(["validate", "--graph", g("thistle222.json")])[0] == 0
    assert run(["validate", "--graph", g("missing.json")])[0] == 3


def test_stretch_and_fixpoint():
    metric = '["1/2","1/4","1/4"]'
    code, rep = run(["stretch", "--graph", g("thistle222.json"), "--auto", g("cyclic.json"), "--metric", metric, "--word-bound", "4"])
    assert code == 0
    assert rep["lambdaR"] == "3/2" and rep["witnessR"] == "v2.g1*v3.g1"
    assert rep["brute_force"]["lambdaR"] == "3/2"
    code, rep = run(["fixpoint", "--graph", g("thistle222.json"), "--auto", g("cyclic.json"), "--metric", metric])
    assert code == 0 and rep["fixed"] is False
    code, rep = run(["fixpoint", "--graph", g("thistle222.json"), "--auto", g("cyclic.json")])
    assert rep["fixed"] is True


def test_displacement_grid_check():
    code, rep = run(["displacement", "--graph", g("thistle222.json"), "--auto", g("cyclic.json"), "--grid-check", "--grid", "12"])
    assert code == 0 and rep["displacement"] == "1" and rep["exact"] is True
    assert rep["grid"]["beats_displacement"] is False


def test_fixrep_redscan_collapse(tmp_path):
    code, rep = run(["fixrep", "--graph", g("thistle222.json"), "--auto", g("cyclic.json")])
    assert code == 0 and rep["single_cycle"] is True
    code, rep = run(["redscan", "--graph", g("thistle2222.json"), "--auto", g("doubleswap.json")])
    assert code == 0 and rep["certificate"] == ["e1", "e2"] and rep["classification"] == "Hyperbolic"
    code, rep = run(["redscan", "--graph", g("thistle222.json"), "--auto", g("cyclic.json")])
    assert code == 0 and rep["result"] == "NoneFound"
    out = tmp_path / "collapse.json"
    code, rep = run(["collapse", "--graph", g("thistle2222.json"), "--edges", "e1,e2", "--out", str(out)])
    assert code == 0 and rep["validation"]["valid"] is True
    assert json.loads(out.read_text()) == rep
    code, rep = run(["collapse", "--graph", g("thistle23.json"), "--edges", "e1"])
    assert code == 1 and rep["error"] == "NotProper"


def test_fixrep_inconclusive(tmp_path):
    skew = tmp_path / "skew.json"
    code, rep = run(["thistle", "--factors", "Z2,Z2,Z2", "--metric", '["1/2","1/4","1/4"]', "--out", str(skew)])
    assert code == 0
    code, rep = run(["fixrep", "--graph", str(skew), "--auto", g("cyclic.json")])
    assert code == 2 and rep["lambdaR"] == "3/2"


def test_misc_commands(tmp_path):
    code, rep = run(["pi1", "--graph", g("thistle23_r1.json")])
    assert code == 0 and rep["factors"] == 2 and rep["rank"] == 1
    dot = tmp_path / "ball.dot"
    code, rep = run(["ball", "--graph", g("thistle23.json"), "--radius", "2", "--dot", str(dot)])
    assert code == 0 and rep["vertices"] == 7 and dot.read_text().startswith("graph")
    assert run(["thistle", "--factors", "", "--rank", "1"])[0] == 1
    assert run(["tlen", "--graph", g("thistle23.json"), "--word", "v9.g1"])[0] == 3


def test_bad_arguments():
    assert main(["nosuchcommand"]) == 3
    assert main(["displacement", "--graph", g("thistle222.json"), "--auto", g("cyclic.json"), "--tolerance", "0"]) == 3


def test_reports_are_byte_deterministic():
    cmd = [sys.executable, "-m", "outerfp", "certify-unique", "--graph", g("thistle222.json"), "--auto", g("cyclic.json"), "--grid", "12"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["unique_center"] is True
