import csv
import json
import shutil
import subprocess

import pytest

from qpainleve import cli, io, qpnn
from qpainleve.errors import ConvergenceError
from qpainleve.sampling import draw_hg_params


@pytest.fixture
def state_file(tmp_path, onshell2):
    p, pair = onshell2
    path = tmp_path / "state.json"
    path.write_text(json.dumps(io.encode_state(p, pair.at_t)))
    return str(path)


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _run(capsys, argv):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _phi_doc(argument, uppers=(0.3, -0.2)):
    return {"uppers": list(uppers), "lowers": [0.4], "base": 0.6, "argument": argument}


# ---------------------------------------------------------------- phi


def test_phi_zero_argument(capsys, tmp_path):
    code, out, _ = _run(capsys, ["phi", "--input", _write(tmp_path, "s.json", _phi_doc(0))])
    assert code == 0
    assert json.loads(out)["value"] == [1.0, 0.0]


def test_phi_unit_upper(capsys, tmp_path):
    path = _write(tmp_path, "s.json", _phi_doc([0.5, 0.2], uppers=(1, 0.7)))
    code, out, _ = _run(capsys, ["phi", "--input", path])
    assert code == 0 and json.loads(out)["value"] == [1.0, 0.0]


def test_phi_truncation_self_consistency(capsys, tmp_path):
    path = _write(tmp_path, "s.json", _phi_doc([0.7, 0.1]))
    _, out1, _ = _run(capsys, ["phi", "--input", path, "--truncation", "20"])
    _, out2, _ = _run(capsys, ["phi", "--input", path, "--truncation", "40"])
    a, b = json.loads(out1), json.loads(out2)
    diff = complex(*a["value"]) - complex(*b["value"])
    assert abs(diff) <= a["tail_estimate"]


def test_phi_resonance_exit(capsys, tmp_path):
    doc = _phi_doc(0.3) | {"lowers": [0.6**-2]}
    code, _, err = _run(capsys, ["phi", "--input", _write(tmp_path, "s.json", doc)])
    assert code == cli.EXIT_RESONANCE and "k = 3" in err


def test_bad_input_exit(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    code, _, err = _run(capsys, ["phi", "--input", str(bad)])
    assert code == cli.EXIT_INPUT and "input error" in err
    code, _, _ = _run(capsys, ["phi", "--input", _write(tmp_path, "s.json", {"uppers": [1]})])
    assert code == cli.EXIT_INPUT


def test_argument_errors(capsys):
    for argv in (["phi"], ["verify", "--tol", "-1"], ["verify", "--precision", "8"], ["nope"]):
        with pytest.raises(SystemExit) as info:
            cli.main(argv)
        assert info.value.code == 2
    capsys.readouterr()


# ---------------------------------------------------------------- evolve


def test_evolve_zero_steps(capsys, tmp_path, state_file):
    csv_path = tmp_path / "orbit.csv"
    code, out, _ = _run(capsys, ["evolve", "--input", state_file, "--steps", "0", "--out", str(csv_path)])
    assert code == 0
    rows = list(csv.reader(csv_path.open()))
    assert len(rows) == 2  # header and step 0
    assert json.loads(out)["relation_residuals"] == []


def test_evolve_ten_steps(capsys, tmp_path, state_file):
    csv_path = tmp_path / "orbit.csv"
    code, out, _ = _run(capsys, ["evolve", "--input", state_file, "--steps", "10", "--out", str(csv_path)])
    summary = json.loads(out)
    assert code == 0
    assert summary["stepper"] == "closed-form"
    assert summary["max_residual"] <= summary["tolerance"]
    assert summary["within_tolerance"]
    assert len(summary["relation_residuals"]) == 10
    assert len(io.read_orbit_csv(csv_path.open())) == 11


def test_evolve_round_trip(capsys, state_file):
    code, out, _ = _run(capsys, ["evolve", "--input", state_file, "--steps", "4", "--roundtrip", "--newton"])
    summary = json.loads(out)
    assert code == 0 and summary["stepper"] == "newton"
    assert summary["roundtrip_deviation"] <= summary["tolerance"]


def test_evolve_high_precision(capsys, state_file):
    code, out, _ = _run(capsys, ["evolve", "--input", state_file, "--steps", "2", "--precision", "30", "--newton"])
    assert code == 0
    assert json.loads(out)["max_residual"] <= 1e-25
    # the closed form presumes the product relation, which double-precision input meets only to roundoff
    code, out, _ = _run(capsys, ["evolve", "--input", state_file, "--steps", "2", "--precision", "30"])
    assert code == 0
    assert json.loads(out)["max_residual"] <= 1e-12


def test_evolve_singular_exit(capsys, tmp_path):
    p = qpnn.QPnnParams(2, 1.5, [0.9, 1.2], [1.1, 0.7])
    path = _write(tmp_path, "s.json", io.encode_state(p, qpnn.QPnnState(0.4, [0.2, 0.5], [0.0, 0.0])))
    code, _, err = _run(capsys, ["evolve", "--input", path, "--steps", "3"])
    assert code == cli.EXIT_SINGULAR and "step 1" in err


def test_evolve_nonconvergence_exit(capsys, state_file, monkeypatch):
    def fail(*args, **kwargs):
        raise ConvergenceError("Newton did not converge", [1.0, 2.0], step=2)

    monkeypatch.setattr(qpnn, "orbit", fail)
    code, _, err = _run(capsys, ["evolve", "--input", state_file, "--steps", "3", "--newton"])
    assert code == cli.EXIT_NEWTON and "step 2" in err


# ---------------------------------------------------------------- verify


def test_verify_all_passes(capsys):
    code, out, _ = _run(capsys, ["verify", "--suite", "all", "--seed", "7"])
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert all(c["value"] <= c["tol"] for c in rep["checks"])
    assert all(c["anchor"] for c in rep["checks"])
    io.validate(rep, "report")


def test_verify_broken_tolerance(capsys):
    code, out, err = _run(capsys, ["verify", "--suite", "weyl", "--tol", "1e-30"])
    assert code == cli.EXIT_FAILED
    assert not json.loads(out)["passed"]
    assert "FAILED [weyl]" in err


def test_verify_qp6_parameters(capsys):
    code, out, _ = _run(capsys, ["verify", "--suite", "qp6", "--seed", "3"])
    data = json.loads(out)["data"]["qp6"]
    assert code == 0
    assert len(data["alphas"]) == 4 and len(data["betas"]) == 4
    assert data["constraint_defect"] <= 1e-14


def test_verify_writes_file(capsys, tmp_path):
    path = tmp_path / "rep.json"
    code, out, _ = _run(capsys, ["verify", "--suite", "lax", "--out", str(path)])
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["suites"] == ["lax"]


# ---------------------------------------------------------------- reduce-qp6 and hg-solution


def test_reduce_qp6(capsys, state_file):
    code, out, _ = _run(capsys, ["reduce-qp6", "--input", state_file, "--steps", "3"])
    doc = json.loads(out)
    assert code == 0
    assert max(doc["stages"].values()) <= 1e-8
    assert len(doc["samples"]) == 4
    assert max(max(r) for r in doc["qp6_residuals"]) <= 1e-8
    assert doc["constraint_defect"] <= 1e-14


def test_reduce_qp6_requires_n2(capsys, tmp_path, onshell3):
    p, pair = onshell3
    path = _write(tmp_path, "s.json", io.encode_state(p, pair.at_t))
    code, _, _ = _run(capsys, ["reduce-qp6", "--input", path])
    assert code == cli.EXIT_INPUT


def _hg_doc(g, n):
    p = draw_hg_params(g, n)
    return {"n": n, "q": io.cpair(p.q), "a": [io.cpair(v) for v in p.a], "b": [io.cpair(v) for v in p.b],
            "truncation": 40, "t": [0.2, 0.3]}


def test_hg_solution(capsys, tmp_path, g):
    doc = _hg_doc(g, 3)
    csv_path = tmp_path / "c.csv"
    code, out, _ = _run(capsys, ["hg-solution", "--input", _write(tmp_path, "h.json", doc),
                                 "--csv", str(csv_path)])
    res = json.loads(out)
    assert code == 0
    assert len(res["coefficients"]) == 41 and res["coefficients"][0][0] == [1.0, 0.0]
    assert len(res["samples"]) == 2 and len(res["samples"][0]["x"]) == 3
    assert len(csv_path.read_text().splitlines()) == 42


def test_hg_solution_constraint_violation(capsys, tmp_path, g):
    doc = _hg_doc(g, 2)
    doc["a"][0] = [1.7, 0.0]
    code, _, err = _run(capsys, ["hg-solution", "--input", _write(tmp_path, "h.json", doc)])
    assert code == cli.EXIT_INPUT and "prod a_j" in err


@pytest.mark.skipif(shutil.which("qpl") is None, reason="console script not installed")
def test_console_script_is_deterministic():
    runs = [subprocess.run(["qpl", "verify", "--suite", "step", "--seed", "11"], capture_output=True, text=True)
            for _ in range(2)]
    assert runs[0].returncode == 0
    assert runs[0].stdout == runs[1].stdout
