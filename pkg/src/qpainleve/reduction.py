"""Reduction of the n = 2 Lax pair from 4x4 to 2x2 and the map to q-Painleve VI.

Outline of the chain for a pair of slices (t, q t):

1. scalar gauge of the 4x4 pencils;
2. q-Laplace transform in the spectral variable, after which the first
   column of both matrices is e_1 and the first row and column can be
   dropped (spectral variable z = 1 / zeta);
3. a second scalar gauge and q-Laplace transform on the 3x3 pencils, again
   dropping the first row and column (z = eps^2 a_1 b_1 zeta, eps = 1 - q);
4. a constant conjugation that makes the resulting 2x2 pencils polynomial,
   with leading coefficient diag(a_2, b_2) for the spectral matrix and I for
   the time matrix.

Scalar gauge factors are never evaluated as functions; only their shift
ratios enter.  Intermediate pencils are reconstructed from samples of the
transformed matrices by exact interpolation at fixed nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _numeric as num
from .errors import FirstColumnError, SingularConfigurationError
from .laxnn import LaxPencil
from .qpnn import QPnnParams, QPnnState, StepPair, _guard

DEFAULT_FIRST_COLUMN_TOL = 1e-9
# interpolation nodes for z; generic points away from 0, 1 and the real axis
NODES = (0.5 + 0.3j, 1.7 - 0.2j, -0.9 + 1.1j, 2.3 + 0.7j, -1.4 - 0.8j)


def _check_n2(params: QPnnParams) -> None:
    if params.n != 2:
        raise ValueError("the reduction chain is defined for n = 2 only")


def build_M4_B4(params: QPnnParams, pair: StepPair, z) -> tuple[np.ndarray, np.ndarray]:
    """The explicit 4x4 spectral and time matrices at ``z``."""
    _check_n2(params)
    q = params.q
    (a1, a2), (b1, b2) = params.a, params.b
    s0, s1 = pair.at_t, pair.at_qt
    t = s0.t
    (x1, x2), (y1, y2) = s0.x, s0.y
    X1, X2 = s1.x
    d0 = _guard(q * t + X1 * y2, "q t + x_1(qt) y_2(t)", abs(q * t) + abs(X1 * y2))
    d1 = _guard(1 + X2 * y1, "1 + x_2(qt) y_1(t)", 1 + abs(X2 * y1))
    M = np.array([
        [a1, y1 - y2 / (q * t), -1, 0],
        [0, b1, x2 - x1, -1],
        [-t * z, 0, a2, y2 - y1],
        [(x1 - t * x2) * z, -z, 0, b2],
    ], dtype=object)
    B = np.array([
        [q * t * a1 / d0, y1, -1, 0],
        [0, 1 + X1 * y1, -X1, 0],
        [-t * z, 0, a2 / d1, y2],
        [-t * X2 * z, 0, 0, 1 + X2 * y2],
    ], dtype=object)
    if not params.mp:
        M, B = M.astype(complex), B.astype(complex)
    return M, B


def qlaplace_reduce(M_star: Sequence, B_star: Sequence, q, zeta) -> tuple[np.ndarray, np.ndarray]:
    """q-Laplace transform of a degree-one pencil pair.

    N = (eps zeta / q + M_1)^{-1} (eps zeta M_0 + M_1) and
    C = B_0 + B_1 (I - N) / (eps zeta), with eps = 1 - q.
    """
    M0, M1 = M_star
    B0, B1 = B_star
    eps = 1 - q
    I = num.eye(M0.shape[0], M0)
    lhs = eps * zeta / q * I + M1
    try:
        N = num.solve(lhs, eps * zeta * M0 + M1)
    except (np.linalg.LinAlgError, ZeroDivisionError):
        raise SingularConfigurationError(f"q^-1 eps zeta I + M_1 (cond ~ {num.cond(lhs):.2e})")
    C = B0 + B1 @ (I - N) / (eps * zeta)
    return N, C


def _linear_pencil(F, check_node=3.0):
    """(P_0, P_1) of a function known to be linear in z, plus a linearity defect."""
    f1, f2 = F(1.0), F(2.0)
    P1 = f2 - f1
    P0 = f1 - P1
    defect = num.maxabs(F(check_node) - (P0 + check_node * P1)) / max(1.0, num.maxabs(f1))
    return (P0, P1), defect


def _first_column_defect(A: np.ndarray) -> float:
    e = num.zeros(A.shape[0], A)
    e[0] = 1
    return num.maxabs(A[:, 0] - e) / max(1.0, num.maxabs(A))


@dataclass
class ReductionTrace:
    """Matrices along the chain at a given zeta, with all recorded checks."""

    zeta: complex
    M4: np.ndarray
    B4: np.ndarray
    M4_star: tuple
    B4_star: tuple
    N4: np.ndarray
    C4: np.ndarray
    M3: tuple
    B3: tuple
    N3: np.ndarray
    C3: np.ndarray
    M2: tuple  # numerator coefficients M_{2,0}, M_{2,1}, M_{2,2}
    B2: tuple  # numerator coefficients B_{2,0}, B_{2,1}
    t: complex = 0
    first_column_4x4: float = 0.0
    first_column_3x3: float = 0.0
    checks: dict = field(default_factory=dict)

    def M2_at(self, z):
        """M_2(z) including its denominator (z - t)(z - 1)."""
        P = sum(c * z**k for k, c in enumerate(self.M2))
        return P / ((z - self.t) * (z - 1))

    def B2_at(self, z):
        return (self.B2[0] + z * self.B2[1]) / (z - self.t)


class _Chain:
    """Intermediate pencils for one pair; each stage is a function of z or zeta."""

    def __init__(self, params: QPnnParams, pair: StepPair, first_column_tol: float):
        _check_n2(params)
        self.p = params
        self.pair = pair
        self.tol = first_column_tol
        self.first_column = {"4x4": 0.0, "3x3": 0.0}
        q, t, a1 = params.q, pair.at_t.t, params.a[0]
        X1 = pair.at_qt.x[0]
        y1, y2 = pair.at_t.y
        self.s1 = (q * t + X1 * y2) / (q * t * a1)
        self.s2 = q * t * a1 / ((q * t + X1 * y2) * (1 + X1 * y1))
        stars, self.lin4 = self._star4()
        self.M4_star, self.B4_star = stars

    def _star4(self):
        q, a1 = self.p.q, self.p.a[0]
        (M0, M1), dm = _linear_pencil(lambda z: build_M4_B4(self.p, self.pair, z)[0])
        (B0, B1), db = _linear_pencil(lambda z: build_M4_B4(self.p, self.pair, z)[1])
        return ((M0 / (q * a1), M1 / (q * a1)), (B0 * self.s1, B1 * self.s1)), max(dm, db)

    def _check_first_column(self, stage, N, C):
        r = max(_first_column_defect(N), _first_column_defect(C))
        self.first_column[stage] = max(self.first_column[stage], r)
        if r > self.tol:
            raise FirstColumnError(stage, r, self.tol)

    def stage4(self, zeta):
        N, C = qlaplace_reduce(self.M4_star, self.B4_star, self.p.q, zeta)
        self._check_first_column("4x4", N, C)
        return N, C

    def M3B3(self, z):
        N, C = self.stage4(1 / z)
        return N[1:, 1:], C[1:, 1:]

    def star3(self):
        if not hasattr(self, "_star3"):
            q, a1, b1 = self.p.q, self.p.a[0], self.p.b[0]
            (M0, M1), dm = _linear_pencil(lambda z: self.M3B3(z)[0])
            (B0, B1), db = _linear_pencil(lambda z: self.M3B3(z)[1])
            self.lin3 = max(dm, db)
            self.M3 = (M0, M1)
            self.B3 = (B0, B1)
            g = a1 / (q * b1)
            self._star3 = ((M0 * g, M1 * g), (B0 * self.s2, B1 * self.s2))
        return self._star3

    def stage3(self, zeta):
        Ms, Bs = self.star3()
        N, C = qlaplace_reduce(Ms, Bs, self.p.q, zeta)
        self._check_first_column("3x3", N, C)
        return N, C

    def M2B2(self, z):
        eps = 1 - self.p.q
        N, C = self.stage3(z / (eps**2 * self.p.a[0] * self.p.b[0]))
        return N[1:, 1:], C[1:, 1:]


def _fit(F, degree: int, nodes=NODES):
    """Exact interpolation through degree + 2 nodes; returns coeffs and top-term defect."""
    zs = list(nodes[: degree + 2])
    samples = [F(z) for z in zs]
    coeffs = num.vandermonde_fit(zs, samples, degree + 1)
    scale = max(1.0, max(num.maxabs(c) for c in coeffs))
    return tuple(coeffs[:-1]), num.maxabs(coeffs[-1]) / scale


def reduce_chain(params: QPnnParams, pair: StepPair, zeta=0.37 + 0.21j,
                 first_column_tol: float = DEFAULT_FIRST_COLUMN_TOL) -> ReductionTrace:
    """Run the chain and record every stage at ``zeta``."""
    ch = _Chain(params, pair, first_column_tol)
    t = pair.at_t.t
    one = num.scalar(1, params.mp)
    zeta = num.scalar(zeta, params.mp)
    M4, B4 = build_M4_B4(params, pair, one / zeta)
    N4, C4 = ch.stage4(zeta)
    ch.star3()
    N3, C3 = ch.stage3(zeta)
    M2, m2deg = _fit(lambda z: ch.M2B2(z)[0] * (z - t) * (z - 1), 2)
    B2, b2deg = _fit(lambda z: ch.M2B2(z)[1] * (z - t), 1)
    trace = ReductionTrace(
        zeta=zeta, M4=M4, B4=B4, M4_star=ch.M4_star, B4_star=ch.B4_star,
        N4=N4, C4=C4, M3=ch.M3, B3=ch.B3, N3=N3, C3=C3, M2=M2, B2=B2, t=t,
    )
    trace.first_column_4x4, trace.first_column_3x3 = ch.first_column["4x4"], ch.first_column["3x3"]
    trace.checks = {
        "linearity_4x4": ch.lin4,
        "linearity_3x3": ch.lin3,
        "M2_numerator_degree": m2deg,
        "B2_numerator_degree": b2deg,
        "M22_closed_form": expected_defect_M22(params, pair.at_t, M2[2]),
        "B21_closed_form": expected_defect_B21(params, pair, B2[1]),
    }
    return trace


def expected_M22(params: QPnnParams, state: QPnnState) -> np.ndarray:
    (a1, a2), (b1, b2) = params.a, params.b
    y1, y2 = state.y
    return np.array([[a2, y2 - y1], [0, b2]], dtype=object if params.mp else complex) / b1


def expected_B21(params: QPnnParams, pair: StepPair) -> np.ndarray:
    a2 = params.a[1]
    y1, y2 = pair.at_t.y
    X1, X2 = pair.at_qt.x
    m = np.array([[a2 / (1 + X2 * y1), y2], [0, 1 + X2 * y2]], dtype=object if params.mp else complex)
    return m / (1 + X1 * y1)


def expected_defect_M22(params, state, M22) -> float:
    D = expected_M22(params, state)
    return num.maxabs(M22 - D) / max(1.0, num.maxabs(D))


def expected_defect_B21(params, pair, B21) -> float:
    D = expected_B21(params, pair)
    return num.maxabs(B21 - D) / max(1.0, num.maxabs(D))


def _U(params: QPnnParams, state: QPnnState) -> tuple[np.ndarray, np.ndarray]:
    a2, b2 = params.a[1], params.b[1]
    y1, y2 = state.y
    _guard(a2 - b2, "a_2 - b_2", abs(a2) + abs(b2))
    u = (y2 - y1) / (a2 - b2)
    dt = object if params.mp else complex
    return np.array([[1, u], [0, 1]], dtype=dt), np.array([[1, -u], [0, 1]], dtype=dt)


def final_gauge(trace: ReductionTrace, params: QPnnParams, pair: StepPair) -> tuple[LaxPencil, LaxPencil]:
    """Polynomial 2x2 pencils: the spectral matrix (degree 2) and the time matrix (degree 1).

    The spectral pencil is ``b_1 U M_{2,k} U^{-1}`` with U the unitriangular
    conjugator of the slice; the time pencil is ``D U(qt) B_{2,k} U(t)^{-1}``
    with D the diagonal shift ratio of the two scalar gauges.  Evaluate them
    by calling with z.
    """
    U0, U0i = _U(params, pair.at_t)
    U1, _ = _U(params, pair.at_qt)
    b1 = params.b[0]
    Mt = LaxPencil(tuple(b1 * (U0 @ c @ U0i) for c in trace.M2))
    a2 = params.a[1]
    y1, y2 = pair.at_t.y
    X1, X2 = pair.at_qt.x
    dt = object if params.mp else complex
    D = np.array([[(1 + X1 * y1) * (1 + X2 * y1) / a2, 0], [0, (1 + X1 * y1) / (1 + X2 * y2)]], dtype=dt)
    Bt = LaxPencil(tuple(D @ U1 @ c @ U0i for c in trace.B2))
    return Mt, Bt


# ---------------------------------------------------------------------------
# q-Painleve VI data


@dataclass(frozen=True)
class QP6Data:
    """One sample of the q-Painleve VI variables with its parameters."""

    t: complex
    x: complex
    y: complex
    alphas: tuple
    betas: tuple
    q: complex

    @property
    def kappas(self) -> tuple:
        return (self.q / self.betas[2], 1 / self.betas[3])

    @property
    def thetas(self) -> tuple:
        a1a2 = self.alphas[0] * self.alphas[1]
        return (a1a2 / self.betas[0], a1a2 / self.betas[1])


def qp6_parameters(params: QPnnParams) -> tuple[tuple, tuple]:
    _check_n2(params)
    sq = params.sqrt_q
    (a1, a2), (b1, b2) = params.a, params.b
    q = params.q
    alphas = (num.scalar(1, params.mp), a1 * b1 / sq, num.scalar(1, params.mp), sq / (a2 * b2))
    betas = (b1 / sq, a1 / sq, q / a2, 1 / b2)
    return alphas, betas


def parameter_constraint_defect(params: QPnnParams) -> float:
    """|b1 b2 / (b3 b4) - q^{-1} a1 a2 / (a3 a4)| for the induced parameters."""
    al, be = qp6_parameters(params)
    lhs = be[0] * be[1] / (be[2] * be[3])
    rhs = al[0] * al[1] / (al[2] * al[3]) / params.q
    return float(abs(lhs - rhs)) / max(1.0, float(abs(lhs)))


class _MChain(_Chain):
    """Spectral half of the chain; needs only the earlier slice."""

    def __init__(self, params: QPnnParams, state: QPnnState, first_column_tol: float):
        _check_n2(params)
        self.p = params
        self.tol = first_column_tol
        self.first_column = {"4x4": 0.0, "3x3": 0.0}
        self.state = state
        q, a1 = params.q, params.a[0]
        dummy = StepPair(state, QPnnState(q * state.t, [0, 0], [0, 0]))
        self.pair = dummy
        (M0, M1), self.lin4 = _linear_pencil(lambda z: build_M4_B4(params, dummy, z)[0])
        I = num.eye(4, M0)
        self.M4_star = (M0 / (q * a1), M1 / (q * a1))
        self.B4_star = (I * 0, I * 0)
        self.s2 = 0

    def _check_first_column(self, stage, N, C):
        super()._check_first_column(stage, N, N)


def spectral_pencil(params: QPnnParams, state: QPnnState, first_column_tol: float = DEFAULT_FIRST_COLUMN_TOL) -> LaxPencil:
    """The 2x2 degree-2 spectral pencil of ``state`` (final gauge applied)."""
    ch = _MChain(params, state, first_column_tol)
    t = state.t
    M2, _ = _fit(lambda z: ch.M2B2(z)[0] * (z - t) * (z - 1), 2)
    U, Ui = _U(params, state)
    return LaxPencil(tuple(params.b[0] * (U @ c @ Ui) for c in M2))


def qp6_from_pencil(params: QPnnParams, t, M: LaxPencil) -> QP6Data:
    """x = -(M_0)_{12} / (M_1)_{12} and y = q (x - t a_1)(x - t a_2) / M(x)_{11}."""
    alphas, betas = qp6_parameters(params)
    m1 = _guard(M.coeffs[1][0, 1], "(1,2) entry of the linear coefficient", num.maxabs(M.coeffs[1]))
    x = -M.coeffs[0][0, 1] / m1
    m11 = _guard(M(x)[0, 0], "(1,1) entry of the spectral matrix at z = x(t)", num.maxabs(M(x)))
    y = params.q * (x - t * alphas[0]) * (x - t * alphas[1]) / m11
    return QP6Data(t, x, y, alphas, betas, params.q)


def map_to_qp6(params: QPnnParams, pair: StepPair | QPnnState) -> QP6Data:
    """q-Painleve VI variables of the earlier slice, read off the 2x2 spectral pencil."""
    state = pair.at_t if isinstance(pair, StepPair) else pair
    return qp6_from_pencil(params, state.t, spectral_pencil(params, state))


def rational_qp6_map(params: QPnnParams, pair: StepPair) -> tuple:
    """The closed-form rational (x, y) expressions in the slice coordinates.

    Kept for comparison: on-shell data mapped this way satisfies the second
    q-Painleve VI equation but not the first, so :func:`map_to_qp6` is the
    map used everywhere else.
    """
    _check_n2(params)
    q, sq = params.q, params.sqrt_q
    (a1, a2), (b1, _) = params.a, params.b
    s0, s1 = pair.at_t, pair.at_qt
    t = s0.t
    (x1, x2), (y1, y2) = s0.x, s0.y
    X1, X2 = s1.x
    xi1 = q * t * x1 * y1 - x1 * y2 - q * t * x2 * y1 + x2 * y2 - (b1 - a1) * q * t
    xi2 = ((t * x2 - x1) * (x2 - x1) * (y2 - q * t * y1) + (b1 - a1) * q * t * x1
           + ((a2 - b1) * t - (a2 - a1)) * q * t * x2)
    c = a1 * b1 * sq * t
    psi1 = (1 - c) * X2 * y2 + q * t - c
    psi2 = a2 * (1 - c) * X1 * X2 * y2 + a1 * (q * t - a2 * b1 * sq * t) * X1 + (a2 - a1) * q * t * X2
    _guard(xi2, "xi_2", max(abs(x1), abs(x2), 1.0))
    _guard(psi2, "psi_2", max(abs(X1), abs(X2), 1.0))
    x = t * (x2 - x1) * xi1 / xi2
    y = X2 * (q * t + X1 * y2) * psi1 / ((1 + X2 * y2) * psi2)
    return x, y


def qp6_residual(now: QP6Data, before: QP6Data) -> tuple[float, float]:
    """Relative defects of the two q-Painleve VI equations at time ``now.t``.

    ``before`` is the sample at ``now.t / q``.
    """
    al, be = now.alphas, now.betas
    t = now.t
    yb = before.y
    den1 = _guard((yb - be[2]) * (yb - be[3]), "(y(t/q) - beta_3)(y(t/q) - beta_4)", abs(yb) ** 2 + 1)
    den2 = _guard((now.x - al[2]) * (now.x - al[3]), "(x(t) - alpha_3)(x(t) - alpha_4)", abs(now.x) ** 2 + 1)
    l1 = now.x * before.x / (al[2] * al[3])
    r1 = (yb - t * be[0]) * (yb - t * be[1]) / den1
    l2 = now.y * yb / (be[2] * be[3])
    r2 = (now.x - t * al[0]) * (now.x - t * al[1]) / den2

    def rel(a, b):
        s = max(float(abs(a)), float(abs(b)), 1e-300)
        return float(abs(a - b)) / s

    return rel(l1, r1), rel(l2, r2)


# ---------------------------------------------------------------------------
# structural checks on the 2x2 pencils


def _match_pair(u: Sequence, v: Sequence) -> float:
    """Distance between two unordered pairs of numbers."""
    d1 = max(abs(u[0] - v[0]), abs(u[1] - v[1]))
    d2 = max(abs(u[0] - v[1]), abs(u[1] - v[0]))
    return float(min(d1, d2))


def spectral_structure_defects(params: QPnnParams, t, M: LaxPencil, zs: Sequence) -> dict:
    """Leading coefficient, constant-term eigenvalues and determinant of the 2x2 pencil."""
    al, _ = qp6_parameters(params)
    (a1, a2), (b1, b2) = params.a, params.b
    dt = object if params.mp else complex
    lead = np.array([[a2, 0], [0, b2]], dtype=dt)
    ev = num.eigvals(M.coeffs[0])
    out = {
        "leading": num.maxabs(M.coeffs[2] - lead) / max(1.0, num.maxabs(lead)),
        "eigenvalues": _match_pair(list(ev), [t * a1, t * b1]) / max(1.0, float(abs(t * a1)), float(abs(t * b1))),
    }
    det_def = 0.0
    for z in zs:
        d = num.det(M(z))
        ref = a2 * b2 * (z - t) * (z - al[1] * t) * (z - 1) * (z - al[3])
        det_def = max(det_def, float(abs(d - ref)) / max(1.0, float(abs(ref))))
    out["determinant"] = det_def
    return out


def verify_B2_adjugate(params: QPnnParams, pair: StepPair, B: LaxPencil, zs: Sequence) -> dict:
    """Checks of the 2x2 time pencil built on the pair (t, q t).

    * the linear coefficient is the identity;
    * z B(z)^{-1} det B(z) = z (z I + tr(B_0) I - B_0);
    * det B(z) = (z - t alpha_1)(z - t alpha_2), with t the earlier time.
    """
    al, _ = qp6_parameters(params)
    t = pair.at_t.t
    B0 = B.coeffs[0]
    I = num.eye(2, B0)
    adj = B0[0, 0] + B0[1, 1]
    Bcal = adj * I - B0
    out = {"linear_identity": num.maxabs(B.coeffs[1] - I)}
    a_def = d_def = 0.0
    for z in zs:
        Bz = B(z)
        dz = num.det(Bz)
        lhs = z * num.inv(Bz) * dz
        rhs = z * (z * I + Bcal)
        a_def = max(a_def, num.maxabs(lhs - rhs) / max(1.0, num.maxabs(rhs)))
        ref = (z - t * al[0]) * (z - t * al[1])
        d_def = max(d_def, float(abs(dz - ref)) / max(1.0, float(abs(ref))))
    out["adjugate"] = a_def
    out["determinant"] = d_def
    return out


def adjugate_identity_defect(A: np.ndarray, z) -> float:
    """Cayley-Hamilton check adj(A + z I) = z I + tr(A) I - A for 2x2 ``A``."""
    I = num.eye(2, A)
    S = A + z * I
    adj = num.inv(S) * num.det(S)
    ref = z * I + (A[0, 0] + A[1, 1]) * I - A
    return num.maxabs(adj - ref) / max(1.0, num.maxabs(ref))
