"""Command-line front end ``qpl``.

Exit codes: 0 success, 1 a verification check failed, 2 bad input,
3 series resonance, 4 singular configuration, 5 Newton non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys
from contextlib import contextmanager

from . import _numeric as num
from . import hypergeom as hg
from . import io, qpnn, reduction, verify
from .errors import ConvergenceError, ResonanceError, SingularConfigurationError
from .qspecial import DEFAULT_TRUNCATION, nphi_with_tail

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_RESONANCE, EXIT_SINGULAR, EXIT_NEWTON = range(6)
EVOLVE_TOL = 1e-10


def _emit(doc, out: str | None = None) -> None:
    text = io.dumps(doc)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


@contextmanager
def _open_out(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_phi(args) -> int:
    spec = io.decode_phispec(io.load_json(args.input), args.truncation, args.mp)
    value, tail = nphi_with_tail(spec)
    _emit({"value": value, "truncation": spec.truncation, "tail_estimate": tail}, args.out)
    return EXIT_OK


def cmd_evolve(args) -> int:
    params, state = io.decode_state(io.load_json(args.input), args.mp)
    orb = qpnn.orbit(params, state, args.steps, newton=args.newton, full_output=True)
    if args.out:
        with _open_out(args.out) as fh:
            io.write_orbit_csv(fh, orb.states, orb.relation_residuals, 1 if args.steps >= 0 else -1)
    summary = {
        "steps": args.steps,
        "stepper": "newton" if (args.newton or params.n != 2 or args.steps < 0) else "closed-form",
        "max_residual": max(orb.max_residuals, default=0.0),
        "relation_residuals": orb.relation_residuals,
        "final_state": io.encode_state(params, orb.states[-1]),
    }
    if args.roundtrip and args.steps:
        back = qpnn.orbit(params, orb.states[-1], -args.steps, newton=args.newton)
        scale = max(1.0, num.maxabs(list(state.x) + list(state.y)))
        summary["roundtrip_deviation"] = back[-1].distance(state) / scale
    tol = EVOLVE_TOL if args.tol is None else args.tol
    summary["tolerance"] = tol
    summary["within_tolerance"] = summary["max_residual"] <= tol and summary.get("roundtrip_deviation", 0.0) <= tol
    print(io.dumps(summary))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = verify.Config(seed=args.seed, tol=args.tol, precision=args.precision,
                        truncation=args.truncation or DEFAULT_TRUNCATION)
    rep = verify.run(args.suite, cfg)
    _emit(rep.to_dict(), args.out)
    for c in rep.failures():
        print(f"FAILED [{c['suite']}] {c['name']}: {c['value']:.3e} > {c['tol']:.1e}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_reduce_qp6(args) -> int:
    params, state = io.decode_state(io.load_json(args.input), args.mp)
    if params.n != 2:
        raise io.InputError("reduce-qp6 needs n = 2")
    steps = max(1, args.steps)
    states = qpnn.orbit(params, state, steps, newton=args.newton)
    pair = qpnn.StepPair(states[0], states[1])
    tr = reduction.reduce_chain(params, pair)
    Mt, Bt = reduction.final_gauge(tr, params, pair)
    zs = list(reduction.NODES)
    mapped = [reduction.map_to_qp6(params, s) for s in states]
    res = [reduction.qp6_residual(mapped[k], mapped[k - 1]) for k in range(1, len(mapped))]
    al, be = reduction.qp6_parameters(params)
    doc = {
        "stages": {
            "first_column_4x4": tr.first_column_4x4,
            "first_column_3x3": tr.first_column_3x3,
            **tr.checks,
            **{f"spectral_{k}": v for k, v in reduction.spectral_structure_defects(params, state.t, Mt, zs).items()},
            **{f"time_{k}": v for k, v in reduction.verify_B2_adjugate(params, pair, Bt, zs).items()},
        },
        "alphas": list(al),
        "betas": list(be),
        "constraint_defect": reduction.parameter_constraint_defect(params),
        "samples": [{"t": m.t, "x": m.x, "y": m.y} for m in mapped],
        "qp6_residuals": [list(r) for r in res],
        "spectral_pencil": Mt.to_json(),
        "time_pencil": Bt.to_json(),
    }
    _emit(doc, args.out)
    return EXIT_OK


def cmd_hg_solution(args) -> int:
    doc = io.load_json(args.input)
    io.validate(doc, "hgspec")
    c = lambda v: io.cparse(v, args.mp)
    K = args.truncation or doc.get("truncation", DEFAULT_TRUNCATION)
    try:
        spec = hg.HGSpec(doc["n"], c(doc["q"]), [c(v) for v in doc["a"]], [c(v) for v in doc["b"]], K,
                         c(doc["sqrt_q"]) if "sqrt_q" in doc else None)
    except ResonanceError:
        raise
    except ValueError as exc:
        raise io.InputError(str(exc)) from exc
    coeffs = hg.series_coeffs(spec, K, "closed_form")
    ts = [c(v) for v in doc.get("t", [])]
    samples = []
    for t in ts:
        sol = hg.phi_solution(spec, t, K, full_output=True)
        samples.append({"t": t, "x": sol.values, "tail_estimates": sol.tails,
                        "branch_warning": sol.branch_warning})
    out = {
        "n": spec.n,
        "truncation": K,
        "exponent": hg._exponent(spec),
        "series_argument_factor": spec.ratio / spec.q,
        "coefficients": [list(v) for v in coeffs],
        "samples": samples,
    }
    if args.csv:
        with _open_out(args.csv) as fh:
            fh.write("k," + ",".join(f"x{j}_re,x{j}_im" for j in range(1, spec.n + 1)) + "\n")
            for k, v in enumerate(coeffs):
                fh.write(f"{k}," + ",".join(f"{io.cpair(u)[0]!r},{io.cpair(u)[1]!r}" for u in v) + "\n")
    _emit(out, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=num.DOUBLE_DIGITS,
                        help="working decimal digits (>15 switches to mpmath)")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--steps", type=int, default=0)
    common.add_argument("--truncation", type=int, default=None)
    common.add_argument("--newton", action="store_true", help="force the Newton stepper for n = 2")
    common.add_argument("--input", default=None)
    common.add_argument("--out", default=None)

    ap = argparse.ArgumentParser(prog="qpl", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("phi", parents=[common], help="evaluate a truncated n_phi_{n-1} series")
    p.set_defaults(func=cmd_phi, needs_input=True)
    p = sub.add_parser("evolve", parents=[common], help="iterate the discrete system")
    p.add_argument("--roundtrip", action="store_true", help="step back afterwards and report the deviation")
    p.set_defaults(func=cmd_evolve, needs_input=True)
    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", choices=["all", *verify.SUITES], default="all")
    p.set_defaults(func=cmd_verify, needs_input=False)
    p = sub.add_parser("reduce-qp6", parents=[common], help="reduce an n = 2 slice to q-Painleve VI")
    p.set_defaults(func=cmd_reduce_qp6, needs_input=True)
    p = sub.add_parser("hg-solution", parents=[common], help="series solution on y = 0")
    p.add_argument("--csv", default=None, help="also write the coefficients as CSV")
    p.set_defaults(func=cmd_hg_solution, needs_input=True)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.tol is not None and not (args.tol > 0 and math.isfinite(args.tol)):
        ap.error("--tol must be a positive number")
    if args.precision < num.DOUBLE_DIGITS:
        ap.error(f"--precision must be at least {num.DOUBLE_DIGITS}")
    if args.needs_input and not args.input:
        ap.error("--input is required")
    args.mp = args.precision > num.DOUBLE_DIGITS
    try:
        with num.working_precision(args.precision):
            return args.func(args)
    except io.InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResonanceError as exc:
        print(f"resonance: {exc}", file=sys.stderr)
        return EXIT_RESONANCE
    except SingularConfigurationError as exc:
        print(f"singular configuration: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except ConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NEWTON


if __name__ == "__main__":
    sys.exit(main())
