"""JSON and CSV encoding.  Complex numbers travel as [re, im] pairs."""

from __future__ import annotations

import csv
import json
from importlib import resources
from typing import IO, Sequence

import jsonschema
from referencing import Registry, Resource

from . import _numeric as num
from .qpnn import QPnnParams, QPnnState
from .qspecial import DEFAULT_TRUNCATION, PhiSpec


class InputError(ValueError):
    """Malformed or schema-violating input document."""


def _schema_registry() -> Registry:
    reg = Registry()
    for name in ("complex.json", "state.json", "phispec.json", "hgspec.json", "report.json"):
        doc = json.loads(resources.files("qpainleve.schemas").joinpath(name).read_text())
        reg = reg.with_resource(name, Resource.from_contents(doc))
    return reg


def schema(name: str) -> dict:
    return json.loads(resources.files("qpainleve.schemas").joinpath(f"{name}.json").read_text())


def validate(doc, name: str) -> None:
    try:
        jsonschema.Draft202012Validator(schema(name), registry=_schema_registry()).validate(doc)
    except jsonschema.ValidationError as exc:
        raise InputError(f"{name} document: {exc.message}") from exc


def cpair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def cparse(v, mp: bool = False):
    return num.scalar(v if isinstance(v, (list, tuple)) else (v, 0), mp)


def to_jsonable(obj):
    """Recursively replace complex and mpmath numbers by [re, im] pairs."""
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if num.is_mp(obj) or isinstance(obj, complex):
        return cpair(obj)
    if hasattr(obj, "tolist"):
        return to_jsonable(obj.tolist())
    return float(obj)


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False)


def load_json(fp: IO | str) -> dict:
    try:
        if isinstance(fp, str):
            with open(fp) as fh:
                return json.load(fh)
        return json.load(fp)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc


def encode_state(params: QPnnParams, state: QPnnState) -> dict:
    return {
        "n": params.n,
        "q": cpair(params.q),
        "sqrt_q": cpair(params.sqrt_q),
        "a": [cpair(v) for v in params.a],
        "b": [cpair(v) for v in params.b],
        "t": cpair(state.t),
        "x": [cpair(v) for v in state.x],
        "y": [cpair(v) for v in state.y],
    }


def decode_state(doc: dict, mp: bool = False) -> tuple[QPnnParams, QPnnState]:
    validate(doc, "state")
    n = doc["n"]
    for key in ("a", "b", "x", "y"):
        if len(doc[key]) != n:
            raise InputError(f"field {key!r} must have n = {n} entries")
    c = lambda v: cparse(v, mp)
    try:
        params = QPnnParams(n, c(doc["q"]), [c(v) for v in doc["a"]], [c(v) for v in doc["b"]],
                            c(doc["sqrt_q"]) if "sqrt_q" in doc else None)
        state = QPnnState(c(doc["t"]), [c(v) for v in doc["x"]], [c(v) for v in doc["y"]])
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return params, state


def decode_phispec(doc: dict, truncation: int | None = None, mp: bool = False) -> PhiSpec:
    validate(doc, "phispec")
    c = lambda v: cparse(v, mp)
    K = truncation or doc.get("truncation", DEFAULT_TRUNCATION)
    try:
        return PhiSpec([c(v) for v in doc["uppers"]], [c(v) for v in doc["lowers"]],
                       c(doc["base"]), c(doc["argument"]), K)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def orbit_header(n: int) -> list:
    cols = ["step", "t_re", "t_im"]
    cols += [f"x{j}_{p}" for j in range(1, n + 1) for p in ("re", "im")]
    cols += [f"y{j}_{p}" for j in range(1, n + 1) for p in ("re", "im")]
    cols.append("relation_residual")
    return cols


def write_orbit_csv(fh: IO, states: Sequence[QPnnState], relation_residuals: Sequence, step_sign: int = 1) -> None:
    """One row per slice; the first row (step 0) has an empty relation residual."""
    n = states[0].n
    w = csv.writer(fh)
    w.writerow(orbit_header(n))
    for k, s in enumerate(states):
        row = [step_sign * k, *cpair(s.t)]
        for v in s.x:
            row += cpair(v)
        for v in s.y:
            row += cpair(v)
        row.append("" if k == 0 else repr(float(relation_residuals[k - 1])))
        w.writerow([r if isinstance(r, str) else repr(r) for r in row])


def read_orbit_csv(fh: IO) -> list[QPnnState]:
    rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        n = sum(1 for k in r if k.startswith("x") and k.endswith("_re"))
        t = complex(float(r["t_re"]), float(r["t_im"]))
        x = [complex(float(r[f"x{j}_re"]), float(r[f"x{j}_im"])) for j in range(1, n + 1)]
        y = [complex(float(r[f"y{j}_re"]), float(r[f"y{j}_im"])) for j in range(1, n + 1)]
        out.append(QPnnState(t, x, y))
    return out
