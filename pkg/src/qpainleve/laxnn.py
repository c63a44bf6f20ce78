"""The 2n x 2n Lax pair of the (n, n) system and its gauge matrices.

``M(z)`` drives the spectral shift z -> q z and ``B(z)`` the time shift
t -> q t.  Compatibility of the two shifts reads

    B(q z; t) M(z; t) = M(z; q t) B(z; t),

where ``M(z; q t)`` is built from the later slice.  Matrix indices in the
docstrings are 1-based, as in ``E_{i,j}``; the arrays are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _numeric as num
from .errors import SingularConfigurationError
from .qpnn import QPnnParams, QPnnState, StepPair, _guard


@dataclass(frozen=True)
class LaxPencil:
    """Matrix polynomial P(z) = sum_k coeffs[k] z^k."""

    coeffs: tuple

    def __post_init__(self):
        cs = [np.asarray(c) for c in self.coeffs]
        while len(cs) > 1 and num.maxabs(cs[-1]) == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def size(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z) -> np.ndarray:
        out = self.coeffs[-1].copy()
        for c in reversed(self.coeffs[:-1]):
            out = out * z + c
        return out

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "coeffs": [
                [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(c, dtype=complex)]
                for c in self.coeffs
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LaxPencil":
        return cls(tuple(
            np.array([[complex(re, im) for re, im in row] for row in c], dtype=complex)
            for c in data["coeffs"]
        ))


def _unit(A: np.ndarray, i: int, j: int, v) -> None:
    A[i - 1, j - 1] += v


def build_M_tilde(params: QPnnParams, state: QPnnState) -> LaxPencil:
    n, q = params.n, params.q
    N = 2 * n
    x, y, t = state.x, state.y, state.t
    P0 = num.zeros((N, N), params.q)
    P1 = num.zeros((N, N), params.q)
    for j in range(1, n + 1):
        _unit(P0, 2 * j - 1, 2 * j - 1, params.a[j - 1])
        _unit(P0, 2 * j, 2 * j, params.b[j - 1])
    _unit(P0, 1, 2, y[0] - state.y0(q))
    for j in range(1, n):
        _unit(P0, 2 * j, 2 * j + 1, x[j] - x[j - 1])
    for j in range(2, n + 1):
        _unit(P0, 2 * j - 1, 2 * j, y[j - 1] - y[j - 2])
    for j in range(1, N - 1):
        _unit(P0, j, j + 2, -1)
    _unit(P1, N, 1, x[0] - t * x[-1])
    _unit(P1, N - 1, 1, -t)
    _unit(P1, N, 2, -1)
    return LaxPencil((P0, P1))


def build_B_tilde(params: QPnnParams, pair: StepPair) -> LaxPencil:
    n, q = params.n, params.q
    N = 2 * n
    s0, s1 = pair.at_t, pair.at_qt
    X, t = s1.x, s0.t
    P0 = num.zeros((N, N), params.q)
    P1 = num.zeros((N, N), params.q)
    for j in range(1, n + 1):
        yj, ym = s0.yy(j, q), s0.yy(j - 1, q)
        d = _guard(1 + X[j - 1] * ym, f"1 + x_{j}(qt) y_{j - 1}(t)", 1 + abs(X[j - 1] * ym))
        _unit(P0, 2 * j - 1, 2 * j - 1, params.a[j - 1] / d)
        _unit(P0, 2 * j, 2 * j, 1 + X[j - 1] * yj)
        _unit(P0, 2 * j - 1, 2 * j, yj)
    for j in range(1, n):
        _unit(P0, 2 * j, 2 * j + 1, -X[j - 1])
        _unit(P0, 2 * j - 1, 2 * j + 1, -1)
    _unit(P1, N, 1, -t * X[-1])
    _unit(P1, N - 1, 1, -t)
    return LaxPencil((P0, P1))


def compatibility_defect(params: QPnnParams, pair: StepPair, z) -> np.ndarray:
    M = build_M_tilde(params, pair.at_t)
    M_next = build_M_tilde(params, pair.at_qt)
    B = build_B_tilde(params, pair)
    return B(params.q * z) @ M(z) - M_next(z) @ B(z)


def lax_compatibility_residual(params: QPnnParams, pair: StepPair, z) -> float:
    """Normalised max-entry defect of the compatibility identity at ``z``."""
    M = build_M_tilde(params, pair.at_t)
    B = build_B_tilde(params, pair)
    D = compatibility_defect(params, pair, z)
    scale = max(1.0, num.maxabs(M(z)) * num.maxabs(B(params.q * z)))
    return num.maxabs(D) / scale


def compatibility_coefficients(params: QPnnParams, pair: StepPair,
                               zs: Sequence | None = None) -> list:
    """Coefficient matrices of the defect polynomial (degree <= 2).

    Four nodes fit a cubic exactly, so the cubic coefficient doubles as a
    check that the defect really has degree two.
    """
    if zs is None:
        zs = [np.exp(2j * np.pi * k / 4) * 0.9 for k in range(4)]
    samples = [compatibility_defect(params, pair, z) for z in zs]
    return num.vandermonde_fit(list(zs), samples, len(zs) - 1)


def coefficient_defect(params: QPnnParams, pair: StepPair, zs: Sequence | None = None) -> float:
    M = build_M_tilde(params, pair.at_t)
    B = build_B_tilde(params, pair)
    scale = max(1.0, max(num.maxabs(c) for c in M.coeffs) * max(num.maxabs(c) for c in B.coeffs))
    return max(num.maxabs(c) for c in compatibility_coefficients(params, pair, zs)) / scale


def gauge_R(j: int, params: QPnnParams, state: QPnnState, z) -> np.ndarray:
    """Gauge matrix accompanying the generator r_j, evaluated at ``z``."""
    n, q = params.n, params.q
    N = 2 * n
    if not 0 <= j < N:
        raise ValueError(f"generator index must lie in 0..{N - 1}")
    R = num.eye(N, params.q)
    if j == 0:
        if z == 0:
            raise SingularConfigurationError("z (R_0 has a pole at z = 0)")
        den = _guard(state.x[0] - state.x0, "x_1(t) - t x_n(t)", abs(state.x[0]) + abs(state.x0))
        _unit(R, 1, N, (params.b[-1] - q * params.a[0]) / den / z)
    elif j % 2 == 0:
        k = j // 2 + 1
        den = _guard(state.x[k - 1] - state.x[k - 2], f"x_{k}(t) - x_{k - 1}(t)",
                     abs(state.x[k - 1]) + abs(state.x[k - 2]))
        _unit(R, 2 * k - 1, 2 * k - 2, (params.b[k - 2] - params.a[k - 1]) / den)
    else:
        k = (j + 1) // 2
        yk, ym = state.yy(k, q), state.yy(k - 1, q)
        den = _guard(yk - ym, f"y_{k}(t) - y_{k - 1}(t)", abs(yk) + abs(ym))
        _unit(R, 2 * k, 2 * k - 1, (params.a[k - 1] - params.b[k - 1]) / den)
    return R


def gauge_law_residual(j: int, params: QPnnParams, state: QPnnState, z) -> float:
    """|M[r_j data](z) - R_j(qz) M(z) R_j(z)^{-1}|, normalised by |M(z)|."""
    from .qpnn import weyl_apply

    p1, s1 = weyl_apply(j, params, state)
    lhs = build_M_tilde(p1, s1)(z)
    M = build_M_tilde(params, state)(z)
    rhs = gauge_R(j, params, state, params.q * z) @ M @ num.inv(gauge_R(j, params, state, z))
    return num.maxabs(lhs - rhs) / max(1.0, num.maxabs(M))
