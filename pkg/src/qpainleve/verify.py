"""Seeded verification suites shared by the CLI and the acceptance tests.

Each suite draws its own random data from ``default_rng([seed, suite_id])``
so that running one suite or all of them gives the same numbers.  A report
is a plain dict; it contains no timings, so equal seeds and settings give
identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _numeric as num
from . import hypergeom as hg
from . import laxnn, qpnn, reduction
from .qspecial import PhiSpec, hg_operator_residual, phi_sampler
from .sampling import draw_hg_params, draw_onshell

SUITES = ("step", "lax", "weyl", "qp6", "hg")
SUITE_IDS = {name: k for k, name in enumerate(SUITES)}


@dataclass
class Config:
    seed: int = 0
    tol: float | None = None  # overrides every per-check threshold when set
    precision: int = num.DOUBLE_DIGITS
    draws: int = 5
    truncation: int = 60

    @property
    def mp(self) -> bool:
        return self.precision > num.DOUBLE_DIGITS


@dataclass
class Report:
    config: Config
    suites: list
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, suite: str, name: str, anchor: str, value: float, tol: float) -> None:
        if self.config.tol is not None:
            tol = self.config.tol
        value = float(value)
        self.checks.append({
            "suite": suite, "name": name, "anchor": anchor,
            "value": value, "tol": float(tol), "passed": bool(value <= tol),
        })

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c["passed"]]

    def to_dict(self) -> dict:
        return {
            "seed": self.config.seed,
            "precision": self.config.precision,
            "suites": list(self.suites),
            "passed": self.passed,
            "checks": self.checks,
            "data": self.data,
        }


def _rng(cfg: Config, suite: str) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, SUITE_IDS[suite]])


def _unit_circle(g: np.random.Generator, k: int) -> list:
    return [complex(np.exp(2j * np.pi * u)) for u in g.uniform(size=k)]


# ---------------------------------------------------------------------------


def suite_step(cfg: Config, rep: Report) -> None:
    g = _rng(cfg, "step")
    s = "step"
    eq = cl = nw = rt = 0.0
    for _ in range(4 * cfg.draws):
        p, pair = draw_onshell(g, 2, mp=cfg.mp)
        s1 = qpnn.step_n2(p, pair.at_t)
        s2 = qpnn.step_newton(p, pair.at_t)
        eq = max(eq, qpnn.equation_residual(p, qpnn.StepPair(pair.at_t, s1)))
        cl = max(cl, s1.distance(pair.at_qt))
        nw = max(nw, s2.distance(s1))
    rep.add(s, "closed-form step, 2n equation residuals (n=2)", "system of difference equations", eq, 1e-10)
    rep.add(s, "closed-form step vs on-shell data (n=2)", "explicit n=2 update", cl, 1e-9)
    rep.add(s, "Newton step vs closed-form step (n=2)", "explicit n=2 update", nw, 1e-9)
    e3 = 0.0
    for _ in range(cfg.draws):
        p, pair = draw_onshell(g, 3, mp=cfg.mp)
        s3 = qpnn.step_newton(p, pair.at_t)
        e3 = max(e3, qpnn.equation_residual(p, qpnn.StepPair(pair.at_t, s3)))
    rep.add(s, "Newton step, 2n equation residuals (n=3)", "system of difference equations", e3, 1e-8)
    p, pair = draw_onshell(g, 2, mp=cfg.mp)
    fwd = qpnn.orbit(p, pair.at_t, 3)
    back = qpnn.orbit(p, fwd[-1], -3)
    rt = back[-1].distance(pair.at_t) / max(1.0, num.maxabs(list(pair.at_t.x) + list(pair.at_t.y)))
    rep.add(s, "forward 3 / backward 3 round trip (n=2)", "system of difference equations", rt, 1e-9)


def suite_lax(cfg: Config, rep: Report) -> None:
    g = _rng(cfg, "lax")
    s = "lax"
    for n in (2, 3):
        pw = cw = 0.0
        for _ in range(cfg.draws):
            p, pair = draw_onshell(g, n, mp=cfg.mp)
            zs = _unit_circle(g, 10)
            pw = max(pw, max(laxnn.lax_compatibility_residual(p, pair, z) for z in zs))
            cw = max(cw, laxnn.coefficient_defect(p, pair))
        rep.add(s, f"compatibility at 10 points of |z|=1 (n={n})", "Lax form compatibility", pw, 1e-8)
        rep.add(s, f"compatibility coefficientwise (n={n})", "Lax form compatibility", cw, 1e-8)


def suite_weyl(cfg: Config, rep: Report) -> None:
    g = _rng(cfg, "weyl")
    s = "weyl"
    inv = br = cm = pres = gl = 0.0
    for _ in range(cfg.draws):
        p, pair = draw_onshell(g, 2, mp=cfg.mp)
        r = qpnn.weyl_verify(p, pair.at_t)
        inv, br, cm = max(inv, r.max_involution), max(br, r.max_braid), max(cm, r.max_commute)
        base = qpnn.equation_residual(p, pair)
        for j in range(4):
            p1, pr1 = qpnn.weyl_apply_pair(j, p, pair)
            pres = max(pres, qpnn.equation_residual(p1, pr1))
            zs = _unit_circle(g, 5)
            gl = max(gl, max(laxnn.gauge_law_residual(j, p, pair.at_t, z) for z in zs))
    rep.add(s, "involutions r_j^2 = id", "affine Weyl group relations", inv, 1e-12)
    rep.add(s, "braid relations (r_j r_j+1)^3 = id", "affine Weyl group relations", br, 1e-10)
    rep.add(s, "commutation of non-adjacent generators", "affine Weyl group relations", cm, 1e-10)
    rep.add(s, "on-shell pairs map to on-shell pairs", "invariance of the system", pres, 1e-8)
    rep.add(s, "gauge law M -> R(qz) M R(z)^-1 for every generator", "gauge matrices", gl, 1e-8)


def suite_qp6(cfg: Config, rep: Report) -> None:
    g = _rng(cfg, "qp6")
    s = "qp6"
    l1 = l2 = d22 = d21 = lead = eig = det = bdet = badj = 0.0
    e1 = e2 = 0.0
    cons = 0.0
    sample = None
    for _ in range(cfg.draws):
        p, pair = draw_onshell(g, 2, mp=cfg.mp)
        tr = reduction.reduce_chain(p, pair)
        l1, l2 = max(l1, tr.first_column_4x4), max(l2, tr.first_column_3x3)
        d22 = max(d22, tr.checks["M22_closed_form"])
        d21 = max(d21, tr.checks["B21_closed_form"])
        Mt, Bt = reduction.final_gauge(tr, p, pair)
        zs = _unit_circle(g, 6)
        sd = reduction.spectral_structure_defects(p, pair.at_t.t, Mt, zs)
        lead, eig, det = max(lead, sd["leading"]), max(eig, sd["eigenvalues"]), max(det, sd["determinant"])
        bd = reduction.verify_B2_adjugate(p, pair, Bt, zs[:5])
        bdet, badj = max(bdet, bd["determinant"]), max(badj, bd["adjugate"], bd["linear_identity"])
        states = qpnn.orbit(p, pair.at_t, 5)
        mapped = [reduction.map_to_qp6(p, st) for st in states]
        for k in range(1, len(mapped)):
            r1, r2 = reduction.qp6_residual(mapped[k], mapped[k - 1])
            e1, e2 = max(e1, r1), max(e2, r2)
        cons = max(cons, reduction.parameter_constraint_defect(p))
        if sample is None:
            al, be = reduction.qp6_parameters(p)
            sample = {
                "alphas": list(al), "betas": list(be),
                "constraint_defect": reduction.parameter_constraint_defect(p),
                "samples": [{"t": m.t, "x": m.x, "y": m.y} for m in mapped],
            }
    rep.add(s, "first column, 4x4 stage", "q-Laplace reduction", l1, 1e-10)
    rep.add(s, "first column, 3x3 stage", "q-Laplace reduction", l2, 1e-10)
    rep.add(s, "quadratic coefficient of the 2x2 spectral numerator", "2x2 reduced pencils", d22, 1e-10)
    rep.add(s, "linear coefficient of the 2x2 time numerator", "2x2 reduced pencils", d21, 1e-10)
    rep.add(s, "leading coefficient diag(a_2, b_2)", "2x2 polynomial Lax pair", lead, 1e-8)
    rep.add(s, "constant-term eigenvalues {t a_1, t b_1}", "2x2 polynomial Lax pair", eig, 1e-8)
    rep.add(s, "spectral determinant quartic", "2x2 polynomial Lax pair", det, 1e-8)
    rep.add(s, "time-matrix determinant factorisation", "2x2 polynomial Lax pair", bdet, 1e-10)
    rep.add(s, "time-matrix adjugate form", "2x2 polynomial Lax pair", badj, 1e-10)
    rep.add(s, "first q-Painleve VI equation on a 5-step orbit", "q-Painleve VI", e1, 1e-8)
    rep.add(s, "second q-Painleve VI equation on a 5-step orbit", "q-Painleve VI", e2, 1e-8)
    rep.add(s, "alpha/beta parameter constraint", "q-Painleve VI parameters", cons, 1e-14)
    rep.data["qp6"] = sample


def suite_hg(cfg: Config, rep: Report) -> None:
    g = _rng(cfg, "hg")
    s = "hg"
    op = agree = hge = spec_res = 0.0
    for k in range(cfg.draws):
        n = 2 + k % 2
        p = draw_hg_params(g, n)
        spec = hg.HGSpec.from_params(p, cfg.truncation)
        # operator annihilation on a generic series of the same order
        ups = [complex(v) for v in g.uniform(-0.9, 0.9, n)]
        los = [complex(v) for v in g.uniform(-0.9, 0.9, n - 1)]
        base = complex(g.uniform(0.3, 0.8))
        t = complex(g.uniform(-0.5, 0.5))
        ps = PhiSpec(ups, los, base, t, cfg.truncation)
        op = max(op, hg_operator_residual(ps, phi_sampler(ps), t, relative=True))
        agree = max(agree, hg.three_way_agreement(spec, 40).worst)
        tt = complex(g.uniform(0.1, 0.5))
        x_t = hg.phi_solution(spec, tt)
        x_b = hg.phi_solution(spec, tt / spec.q)
        hge = max(hge, num.maxabs(hg.hge_residual(spec, x_t, x_b, tt)) / max(1.0, num.maxabs(x_t)))
        spec_res = max(spec_res, hg.verify_specialization(spec, tt).max_residual)
    rep.add(s, "series annihilated by its q-difference operator", "hypergeometric q-difference operator", op, 1e-8)
    rep.add(s, "recurrence / closed form / series agreement, k <= 40", "series coefficients", agree, 1e-10)
    rep.add(s, "linear system residual of the series solution", "linear system on y = 0", hge, 1e-8)
    rep.add(s, "series solution solves the nonlinear system", "y = 0 specialisation", spec_res, 1e-8)


RUNNERS = {
    "step": suite_step,
    "lax": suite_lax,
    "weyl": suite_weyl,
    "qp6": suite_qp6,
    "hg": suite_hg,
}


def run(suite: str = "all", cfg: Config | None = None) -> Report:
    cfg = cfg or Config()
    names = list(SUITES) if suite == "all" else [suite]
    for name in names:
        if name not in RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
    rep = Report(cfg, names)
    with num.working_precision(cfg.precision):
        for name in names:
            RUNNERS[name](cfg, rep)
    return rep
