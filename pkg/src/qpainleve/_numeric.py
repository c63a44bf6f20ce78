"""Scalar and small-matrix helpers shared by every module.

Two arithmetic backends are supported.  At the default precision scalars are
Python ``complex`` and matrices are ``complex128`` numpy arrays.  When a
higher working precision is requested, scalars are ``mpmath.mpc`` and
matrices are numpy object arrays of ``mpc``; numpy still does the matrix
products, while solves, determinants and eigenvalues go through mpmath.

The backend of a computation is decided by its inputs: anything touching an
``mpc`` is carried out in mpmath.
"""

from __future__ import annotations

import cmath
import contextlib
from typing import Iterable, Sequence

import mpmath
import numpy as np

DOUBLE_DIGITS = 15


def is_mp(*values) -> bool:
    for v in values:
        if isinstance(v, (mpmath.mpc, mpmath.mpf)):
            return True
        if isinstance(v, np.ndarray) and v.dtype == object:
            return True
        if isinstance(v, (list, tuple)) and v and is_mp(*v):
            return True
    return False


def digits_of(*values) -> int:
    return mpmath.mp.dps if is_mp(*values) else DOUBLE_DIGITS


def eps_of(*values) -> float:
    """Unit roundoff of the backend the values live in."""
    if is_mp(*values):
        return float(mpmath.mpf(2) ** (-mpmath.mp.prec))
    return float(np.finfo(float).eps)


@contextlib.contextmanager
def working_precision(digits: int):
    """Set the mpmath working precision for the duration of the block."""
    with mpmath.workdps(max(int(digits), DOUBLE_DIGITS)):
        yield


def scalar(value, mp: bool = False):
    """Coerce ``value`` to the backend scalar type.

    Accepts numbers, mpmath numbers, or ``[re, im]`` pairs.
    """
    if isinstance(value, (list, tuple)):
        re, im = value
        value = mpmath.mpc(re, im) if mp else complex(float(re), float(im))
    if mp:
        return mpmath.mpc(value)
    if isinstance(value, (mpmath.mpc, mpmath.mpf)):
        return complex(value)
    return complex(value)


def vector(values: Iterable, mp: bool = False) -> np.ndarray:
    vals = [scalar(v, mp) for v in values]
    if mp:
        out = np.empty(len(vals), dtype=object)
        out[:] = vals
        return out
    return np.array(vals, dtype=complex)


def zeros(shape, like=None) -> np.ndarray:
    if is_mp(like):
        out = np.empty(shape, dtype=object)
        out.fill(mpmath.mpc(0))
        return out
    return np.zeros(shape, dtype=complex)


def eye(n: int, like=None) -> np.ndarray:
    out = zeros((n, n), like)
    for i in range(n):
        out[i, i] = scalar(1, is_mp(like))
    return out


def _to_mp(A: np.ndarray) -> mpmath.matrix:
    return mpmath.matrix([[mpmath.mpc(v) for v in row] for row in np.atleast_2d(A)])


def _from_mp(M: mpmath.matrix, shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    flat = [M[i, j] for i in range(M.rows) for j in range(M.cols)]
    out.reshape(-1)[:] = flat
    return out


def solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    if is_mp(A, b):
        b = np.asarray(b, dtype=object)
        rhs = b.reshape(len(b), -1)
        cols = [
            mpmath.lu_solve(_to_mp(A), mpmath.matrix([mpmath.mpc(v) for v in rhs[:, k]]))
            for k in range(rhs.shape[1])
        ]
        out = np.empty(rhs.shape, dtype=object)
        for k, col in enumerate(cols):
            out[:, k] = [col[i] for i in range(col.rows)]
        return out.reshape(b.shape)
    return np.linalg.solve(np.asarray(A, dtype=complex), np.asarray(b, dtype=complex))


def inv(A: np.ndarray) -> np.ndarray:
    if is_mp(A):
        return _from_mp(mpmath.inverse(_to_mp(A)), A.shape)
    return np.linalg.inv(np.asarray(A, dtype=complex))


def det(A: np.ndarray):
    if is_mp(A):
        return mpmath.mpc(mpmath.det(_to_mp(A)))
    return complex(np.linalg.det(np.asarray(A, dtype=complex)))


def eigvals(A: np.ndarray) -> np.ndarray:
    if is_mp(A):
        ev = mpmath.eig(_to_mp(A), left=False, right=False)
        return vector(ev, mp=True)
    return np.linalg.eigvals(np.asarray(A, dtype=complex))


def cond(A: np.ndarray) -> float:
    """2-norm condition number (double precision estimate in either backend)."""
    return float(np.linalg.cond(np.asarray(A, dtype=complex)))


def sqrt(x):
    return mpmath.sqrt(x) if is_mp(x) else cmath.sqrt(x)


def log(x):
    return mpmath.log(x) if is_mp(x) else cmath.log(x)


def exp(x):
    return mpmath.exp(x) if is_mp(x) else cmath.exp(x)


def power(base, exponent):
    """Principal branch ``base**exponent``."""
    if is_mp(base, exponent):
        return mpmath.power(mpmath.mpc(base), exponent)
    return complex(base) ** exponent


def maxabs(values) -> float:
    """max |v| over a scalar, sequence or array, as a float."""
    arr = np.asarray(values, dtype=object if is_mp(values) else complex).ravel()
    if arr.size == 0:
        return 0.0
    return float(max(abs(v) for v in arr))


def vandermonde_fit(zs: Sequence, samples: Sequence[np.ndarray], degree: int) -> list:
    """Coefficient matrices P_0..P_degree of a matrix polynomial through samples.

    Requires ``len(zs) == degree + 1`` (exact interpolation).
    """
    if len(zs) != degree + 1:
        raise ValueError("interpolation needs exactly degree + 1 nodes")
    like = samples[0]
    V = zeros((len(zs), degree + 1), like)
    for i, z in enumerate(zs):
        for k in range(degree + 1):
            V[i, k] = z**k
    shape = np.shape(like)
    stacked = np.stack([np.asarray(s).reshape(-1) for s in samples])
    coeffs = solve(V, stacked)
    return [coeffs[k].reshape(shape) for k in range(degree + 1)]
