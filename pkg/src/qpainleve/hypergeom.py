"""Particular solutions on the locus y = 0.

With all y_j = 0 and prod a_j = q^{(n-1)/2} the system becomes linear:

    x(t / q) = (A_0 + A_1 / (1 - t / q)) x(t).

A Frobenius-type series x(t) = t^lam sum_k x_k (t / q)^k with
lam = -log_q a_1 solves it; the coefficients follow from the recurrence

    (A_0 + A_1 - a_1 q^{-k} I) x_k = (A_0 - a_1 q^{-k+1} I) x_{k-1},

and also in closed form as products of q-shifted factorials in the base
p = 1/q, which makes each component a multiple of an n_phi_{n-1} series.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _numeric as num
from .errors import ResonanceError
from .qpnn import QPnnParams, QPnnState, StepPair, residual_system
from .qspecial import DEFAULT_TRUNCATION, PhiSpec, nphi_with_tail, q_pochhammer

CONSTRAINT_TOL = 1e-12


@dataclass(frozen=True)
class HGSpec:
    n: int
    q: complex
    a: tuple
    b: tuple
    truncation: int = DEFAULT_TRUNCATION
    sqrt_q: complex | None = None
    strict: bool = True

    def __post_init__(self):
        p = QPnnParams(self.n, self.q, self.a, self.b, self.sqrt_q)
        object.__setattr__(self, "q", p.q)
        object.__setattr__(self, "a", p.a)
        object.__setattr__(self, "b", p.b)
        object.__setattr__(self, "sqrt_q", p.sqrt_q)
        if self.strict:
            d = self.constraint_defect
            if d > CONSTRAINT_TOL * max(1.0, num.eps_of(p.q) / 2.2e-16):
                raise ValueError(f"prod a_j must equal q^((n-1)/2); defect {d:.3e}")
            self._check_generic()

    @classmethod
    def from_params(cls, params: QPnnParams, truncation: int = DEFAULT_TRUNCATION, strict: bool = True):
        return cls(params.n, params.q, params.a, params.b, truncation, params.sqrt_q, strict)

    @property
    def params(self) -> QPnnParams:
        return QPnnParams(self.n, self.q, self.a, self.b, self.sqrt_q)

    @property
    def mp(self) -> bool:
        return num.is_mp(self.q)

    @property
    def constraint_defect(self) -> float:
        prod = 1
        for v in self.a:
            prod *= v
        c = self.sqrt_q ** (self.n - 1)
        return float(abs(prod - c)) / float(abs(c))

    @property
    def ratio(self):
        """prod b / prod a, the growth factor of the series coefficients."""
        r = 1
        for u, v in zip(self.b, self.a):
            r *= u / v
        return r

    def _check_generic(self) -> None:
        """Multiplicative non-resonance: a_i / a_j avoids q^m for |m| <= K + 1."""
        K = self.truncation
        q = self.q
        for i in range(self.n):
            for j in range(self.n):
                if i == j:
                    continue
                r = self.a[i] / self.a[j]
                qm = q ** (-(K + 1))
                for m in range(-(K + 1), K + 2):
                    if abs(r - qm) <= 1e-12 * abs(qm):
                        raise ResonanceError(f"a_{i + 1}/a_{j + 1} = q^{m}", k=abs(m))
                    qm *= q


def build_A0_A1(spec: HGSpec) -> tuple[np.ndarray, np.ndarray]:
    n = spec.n
    A0 = num.zeros((n, n), spec.q)
    A1 = num.zeros((n, n), spec.q)
    for i in range(n):
        A0[i, i] = spec.b[i]
        for j in range(n):
            if j > i:
                A0[i, j] = spec.b[j] - spec.a[j]
            A1[i, j] = spec.a[j] - spec.b[j]
    S = A0 + A1
    lower_ok = all(S[i, j] == 0 for i in range(n) for j in range(i + 1, n))
    diag_ok = all(abs(S[i, i] - spec.a[i]) <= 1e-12 * max(1.0, abs(spec.a[i])) for i in range(n))
    if not (lower_ok and diag_ok):
        raise AssertionError("A_0 + A_1 is not lower triangular with diagonal a")
    return A0, A1


def hge_residual(spec: HGSpec, x_t, x_qinvt, t) -> np.ndarray:
    """x(t/q) - (A_0 + A_1 / (1 - t/q)) x(t)."""
    d = 1 - t / spec.q
    if d == 0:
        raise ValueError("pole of the linear system at t = q")
    A0, A1 = build_A0_A1(spec)
    xt = num.vector(x_t, spec.mp)
    return num.vector(x_qinvt, spec.mp) - (A0 + A1 / d) @ xt


def _null_vector(spec: HGSpec) -> list:
    A0, A1 = build_A0_A1(spec)
    L = A0 + A1
    a1 = spec.a[0]
    x0 = [num.scalar(1, spec.mp)]
    for i in range(1, spec.n):
        piv = L[i, i] - a1
        if abs(piv) <= 1e-13 * max(1.0, abs(a1)):
            raise ResonanceError(f"null space has dimension > 1 (a_{i + 1} = a_1)", k=0)
        s = sum(L[i, j] * x0[j] for j in range(i))
        x0.append(-s / piv)
    return x0


def initial_coefficients(spec: HGSpec) -> list:
    """x_{0,j} = prod_{i<j} (b_i - a_1) / (a_{i+1} - a_1)."""
    a1 = spec.a[0]
    out = [num.scalar(1, spec.mp)]
    for j in range(1, spec.n):
        out.append(out[-1] * (spec.b[j - 1] - a1) / (spec.a[j] - a1))
    return out


def phi_parameters(spec: HGSpec, j: int) -> tuple[list, list]:
    """Upper and lower parameters of the series in component j (1-based), base 1/q."""
    p = 1 / spec.q
    a1 = spec.a[0]
    n = spec.n
    uppers = [p * a1 / spec.b[i - 1] for i in range(1, j)] + [a1 / spec.b[i - 1] for i in range(j, n + 1)]
    lowers = [p * a1 / spec.a[i - 1] for i in range(2, j + 1)] + [a1 / spec.a[i - 1] for i in range(j + 1, n + 1)]
    return uppers, lowers


def _closed_form(spec: HGSpec, K: int, base, shift) -> list:
    n = spec.n
    x0 = initial_coefficients(spec)
    r = spec.ratio
    a1 = spec.a[0]
    out = []
    for k in range(K + 1):
        vec = []
        for j in range(1, n + 1):
            ups = [shift * a1 / spec.b[i - 1] for i in range(1, j)] + [a1 / spec.b[i - 1] for i in range(j, n + 1)]
            los = [shift * a1 / spec.a[i - 1] for i in range(2, j + 1)] + [a1 / spec.a[i - 1] for i in range(j + 1, n + 1)]
            numer = 1
            for u in ups:
                numer *= q_pochhammer(u, base, k)
            den = q_pochhammer(base, base, k)
            for v in los:
                den *= q_pochhammer(v, base, k)
            if den == 0:
                raise ResonanceError("closed-form denominator vanishes", k=k)
            vec.append(r**k * numer / den * x0[j - 1])
        out.append(num.vector(vec, spec.mp))
    return out


def series_coeffs(spec: HGSpec, K: int | None = None, method: str = "recurrence") -> list:
    """Coefficient vectors x_0..x_K of the series in powers of t/q.

    ``method`` is ``"recurrence"``, ``"closed_form"`` (base 1/q), or
    ``"product_base_q"``, which evaluates the same product formula with base q
    and shift q and is kept only to document that it does not solve the
    recurrence.
    """
    K = spec.truncation if K is None else K
    if method == "closed_form":
        return _closed_form(spec, K, 1 / spec.q, 1 / spec.q)
    if method == "product_base_q":
        return _closed_form(spec, K, spec.q, spec.q)
    if method != "recurrence":
        raise ValueError(f"unknown method {method!r}")
    A0, A1 = build_A0_A1(spec)
    S = A0 + A1
    I = num.eye(spec.n, spec.q)
    a1, q = spec.a[0], spec.q
    xs = [num.vector(_null_vector(spec), spec.mp)]
    qk = 1  # q^{-k+1}
    for k in range(1, K + 1):
        lhs = S - a1 * (qk / q) * I
        piv = min(abs(lhs[i, i]) for i in range(spec.n))
        if piv <= 1e-13 * max(1.0, abs(a1)):
            raise ResonanceError("shifted matrix A_0 + A_1 - a_1 q^-k I is singular", k=k)
        rhs = (A0 - a1 * qk * I) @ xs[-1]
        xs.append(num.solve(lhs, rhs))
        qk = qk / q
    return xs


@dataclass
class PhiSolution:
    t: complex
    values: list
    exponent: complex
    tails: list = field(default_factory=list)
    branch_warning: bool = False


def _exponent(spec: HGSpec):
    """-log_q a_1 with principal logarithms."""
    return -num.log(spec.a[0]) / num.log(spec.q)


def _is_positive_real(v) -> bool:
    return float(abs(complex(v).imag)) == 0.0 and complex(v).real > 0


def phi_solution(spec: HGSpec, t, K: int | None = None, full_output: bool = False):
    """x_j(t) = t^{-log_q a_1} x_{0,j} phi_j(t) with phi_j evaluated as a truncated series.

    Principal branches of log t, log a_1 and log q are used; ``branch_warning``
    in the full output flags a_1 or q off the positive real axis.
    """
    K = spec.truncation if K is None else K
    lam = _exponent(spec)
    pref = num.exp(lam * num.log(t))
    arg = spec.ratio * t / spec.q
    c = initial_coefficients(spec)
    vals, tails = [], []
    for j in range(1, spec.n + 1):
        ups, los = phi_parameters(spec, j)
        ps = PhiSpec(ups, los, 1 / spec.q, arg, K)
        v, tail = nphi_with_tail(ps)
        vals.append(pref * c[j - 1] * v)
        tails.append(tail)
    if not full_output:
        return vals
    warn = not (_is_positive_real(spec.a[0]) and _is_positive_real(spec.q))
    return PhiSolution(t, vals, lam, tails, warn)


def coefficient_series_value(spec: HGSpec, t, coeffs: list) -> list:
    """t^lam sum_k (t/q)^k x_k for given coefficient vectors."""
    lam = _exponent(spec)
    pref = num.exp(lam * num.log(t))
    s = t / spec.q
    acc = [0] * spec.n
    sk = 1
    for xk in coeffs:
        acc = [u + sk * v for u, v in zip(acc, xk)]
        sk *= s
    return [pref * v for v in acc]


@dataclass
class SpecializationReport:
    max_x_residual: float
    max_y_residual: float
    relation_residual: float
    pair: StepPair

    @property
    def max_residual(self) -> float:
        return max(self.max_x_residual, self.max_y_residual, self.relation_residual)


def specialized_pair(spec: HGSpec, t, K: int | None = None) -> StepPair:
    """Slices at t and q t with y = 0 and x from the series solution."""
    zero = [num.scalar(0, spec.mp)] * spec.n
    s0 = QPnnState(t, phi_solution(spec, t, K), zero)
    s1 = QPnnState(spec.q * s0.t, phi_solution(spec, spec.q * s0.t, K), zero)
    return StepPair(s0, s1)


def verify_specialization(spec: HGSpec, t, K: int | None = None) -> SpecializationReport:
    """Nonlinear residuals of the series solution; needs |prod b / prod a| |t| < 1."""
    pair = specialized_pair(spec, t, K)
    res = residual_system(spec.params, pair)
    n = spec.n
    scale = max(1.0, num.maxabs(list(pair.at_t.x) + list(pair.at_qt.x)))
    return SpecializationReport(
        max_x_residual=num.maxabs(res[:n]) / scale,
        max_y_residual=num.maxabs(res[n:2 * n]),
        relation_residual=float(abs(res[-1])),
        pair=pair,
    )


def promote(spec: HGSpec) -> HGSpec:
    """Copy of ``spec`` in the high-precision backend at the current working precision."""
    import mpmath

    c = lambda v: mpmath.mpc(v)
    return HGSpec(spec.n, c(spec.q), [c(v) for v in spec.a], [c(v) for v in spec.b],
                  spec.truncation, c(spec.sqrt_q), spec.strict)


def recurrence_digits(spec: HGSpec, K: int) -> int:
    """Working digits that keep the recurrence accurate to about 20 digits up to order K.

    The recurrence loses roughly a factor 1 / |prod b / prod a| of relative
    accuracy per order through cancellation in its right-hand side.
    """
    r = float(abs(spec.ratio))
    loss = K * max(0.0, -np.log10(r)) if r > 0 else 0.0
    return int(30 + loss + 2 * K * np.log10(max(2.0, float(abs(spec.q)))) / 10)


@dataclass
class Agreement:
    recurrence_vs_closed: float
    closed_vs_phi: float
    digits: int

    @property
    def worst(self) -> float:
        return max(self.recurrence_vs_closed, self.closed_vs_phi)


def three_way_agreement(spec: HGSpec, K: int = 40, t=0.3) -> Agreement:
    """Per-order relative discrepancy of recurrence and closed form, and series-value check.

    Runs in the high-precision backend with :func:`recurrence_digits` digits.
    The series check compares the solution vector evaluated from the
    closed-form coefficients with :func:`phi_solution` at ``t``.
    """
    digits = recurrence_digits(spec, K)
    with num.working_precision(digits):
        hp = promote(spec)
        rec = series_coeffs(hp, K, "recurrence")
        cf = series_coeffs(hp, K, "closed_form")
        rc = max(
            num.maxabs(u - v) / num.maxabs(v) for u, v in zip(rec, cf) if num.maxabs(v) != 0
        )
        tt = num.scalar(t, True)
        ph = phi_solution(hp, tt, K)
        cv = coefficient_series_value(hp, tt, cf)
        pv = num.maxabs([u - v for u, v in zip(ph, cv)]) / num.maxabs(ph)
    return Agreement(float(rc), float(pv), digits)
