import io as stdio
import json

import mpmath
import numpy as np
import pytest

from qpainleve import io
from qpainleve.qpnn import orbit


def test_complex_round_trip():
    z = 0.25 - 1.5j
    assert io.cparse(io.cpair(z)) == z
    assert io.cparse(2.0) == 2
    with mpmath.workdps(30):
        v = io.cparse([1, 2], mp=True)
        assert isinstance(v, mpmath.mpc)


def test_to_jsonable_nested():
    doc = {"a": [1 + 2j, np.float64(0.5)], "b": (mpmath.mpc(1, -1),), "c": np.array([1j]), "d": True}
    out = io.to_jsonable(doc)
    assert out == {"a": [[1.0, 2.0], 0.5], "b": [[1.0, -1.0]], "c": [[0.0, 1.0]], "d": True}
    json.dumps(out)


def test_state_round_trip(onshell2):
    p, pair = onshell2
    doc = json.loads(json.dumps(io.encode_state(p, pair.at_t)))
    p2, s2 = io.decode_state(doc)
    assert p2 == p and s2 == pair.at_t


def test_state_decode_high_precision(onshell2):
    p, pair = onshell2
    doc = io.encode_state(p, pair.at_t)
    with mpmath.workdps(40):
        p2, _ = io.decode_state(doc, mp=True)
        assert abs(p2.sqrt_q**2 - p2.q) < mpmath.mpf(10) ** -35


@pytest.mark.parametrize(
    "patch",
    [{"n": 1}, {"q": "two"}, {"x": [[1, 2, 3], 0]}, {"a": [1.0]}, {"q": 0.5}, {"t": 0}],
    ids=["n", "q-type", "complex-shape", "length", "q-range", "t-zero"],
)
def test_state_rejects_bad_documents(onshell2, patch):
    p, pair = onshell2
    doc = io.encode_state(p, pair.at_t) | patch
    with pytest.raises(io.InputError):
        io.decode_state(doc)


def test_missing_field():
    with pytest.raises(io.InputError, match="state"):
        io.decode_state({"n": 2})


def test_phispec_decode_with_truncation_override():
    spec = io.decode_phispec({"uppers": [0.1, 0.2], "lowers": [0.3], "base": 0.5, "argument": [0.1, 0.1],
                              "truncation": 12}, truncation=30)
    assert spec.truncation == 30
    spec = io.decode_phispec({"uppers": [0.1, 0.2], "lowers": [0.3], "base": 0.5, "argument": 0})
    assert spec.truncation == 60


def test_phispec_invalid_base():
    with pytest.raises(io.InputError):
        io.decode_phispec({"uppers": [0.1, 0.2], "lowers": [0.3], "base": 2, "argument": 0})


def test_load_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(io.InputError):
        io.load_json(str(bad))
    with pytest.raises(io.InputError):
        io.load_json(str(tmp_path / "missing.json"))


def test_orbit_csv_round_trip(onshell2):
    p, pair = onshell2
    orb = orbit(p, pair.at_t, 4, full_output=True)
    buf = stdio.StringIO()
    io.write_orbit_csv(buf, orb.states, orb.relation_residuals)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0].split(",") == io.orbit_header(2)
    assert len(lines) == 6
    assert lines[1].endswith(",")
    back = io.read_orbit_csv(stdio.StringIO(buf.getvalue()))
    assert all(a == b for a, b in zip(back, orb.states))


def test_report_schema_accepts_verify_output():
    from qpainleve import verify

    rep = verify.run("weyl", verify.Config(seed=1, draws=1))
    io.validate(json.loads(io.dumps(rep.to_dict())), "report")
