"""Seeded random draws of parameters and on-shell data.

Draw ranges: q uniform in [1.1, 2], a_j and b_j log-uniform in [0.5, 2],
t uniform in [0.1, 0.9].  A draw is rejected and redrawn whenever one of the
monitored denominators has modulus below ``REJECT``.

On-shell pairs are built with linear solves only, so they are exact to
roundoff and independent of the steppers: pick x(qt) and y_1..y_{n-1} at
random, solve the product relation for y_n (it is linear in y_n), then solve
the x-equations for x(t) and the y-equations for y(qt).
"""

from __future__ import annotations

import math

import numpy as np

from . import _numeric as num
from .errors import SingularConfigurationError
from .qpnn import QPnnParams, QPnnState, StepPair, _solve_x, _solve_Y, residual_system

REJECT = 1e-6
MAX_REDRAWS = 1000


def rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _loguniform(g: np.random.Generator, size: int) -> list:
    return list(np.exp(g.uniform(math.log(0.5), math.log(2.0), size)))


def draw_params(g: np.random.Generator, n: int, mp: bool = False) -> QPnnParams:
    q = g.uniform(1.1, 2.0)
    a, b = _loguniform(g, n), _loguniform(g, n)
    return QPnnParams(n, num.scalar(q, mp), [num.scalar(v, mp) for v in a], [num.scalar(v, mp) for v in b])


def _onshell_from(params: QPnnParams, t, X: list, y_head: list) -> StepPair:
    n, q, sq = params.n, params.q, params.sqrt_q
    y = list(y_head) + [0]
    s = QPnnState(t, [0] * n, y)
    # relation: K (1 + X_n y_n) / (1 + X_1 y_n / (q t)) = q^{(n-1)/2}, linear in y_n
    K = 1
    for j in range(1, n + 1):
        K *= params.a[j - 1]
        if j < n:
            K *= 1 + X[j - 1] * s.yy(j, q)
        if j > 1:
            K /= 1 + X[j - 1] * s.yy(j - 1, q)
    c = params.relation_constant
    den = K * X[-1] - c * X[0] / (q * t)
    if abs(den) < REJECT:
        raise SingularConfigurationError("relation solve for y_n")
    y[-1] = (c - K) / den
    S_partial = QPnnState(q * t, X, [0] * n)
    x = _solve_x(params, S_partial, y)
    s0 = QPnnState(t, x, y)
    Y = _solve_Y(params, s0, X)
    return StepPair(s0, QPnnState(q * t, X, Y))


def _denominators(params: QPnnParams, pair: StepPair) -> list:
    q = params.q
    s0, s1 = pair.at_t, pair.at_qt
    n = params.n
    Xv = lambda j: q * s0.t * s1.x[-1] if j == 0 else s1.x[j - 1]
    out = []
    for j in range(1, n + 1):
        out += [1 + Xv(j) * s0.yy(j - 1, q), 1 + Xv(j) * s0.yy(j, q), 1 + Xv(j - 1) * s0.yy(j - 1, q)]
    xs = [s0.xx(j) for j in range(n + 1)]
    ys = [s0.yy(j, q) for j in range(n + 1)]
    out += [xs[j] - xs[j - 1] for j in range(1, n + 1)]
    out += [ys[j] - ys[j - 1] for j in range(1, n + 1)]
    out += [1 - s0.t, 1 - 1 / (q * q * s0.t)]
    return out


def draw_onshell(g: np.random.Generator, n: int, params: QPnnParams | None = None,
                 mp: bool = False) -> tuple[QPnnParams, StepPair]:
    """Random parameters (unless given) with a random on-shell pair."""
    for _ in range(MAX_REDRAWS):
        p = params if params is not None else draw_params(g, n, mp)
        t = num.scalar(g.uniform(0.1, 0.9), mp)
        X = [num.scalar(v, mp) for v in g.uniform(-1, 1, n)]
        yh = [num.scalar(v, mp) for v in g.uniform(-1, 1, n - 1)]
        try:
            pair = _onshell_from(p, t, X, yh)
            if min(abs(d) for d in _denominators(p, pair)) < REJECT:
                continue
            if num.maxabs(pair.at_t.x + pair.at_t.y + pair.at_qt.y) > 1e3:
                continue
            residual_system(p, pair)
        except (SingularConfigurationError, ZeroDivisionError):
            continue
        return p, pair
    raise RuntimeError("could not draw a nonsingular on-shell configuration")


def draw_hg_params(g: np.random.Generator, n: int, mp: bool = False):
    """Parameters with prod a_j = q^{(n-1)/2} and a convergent series domain.

    a_n is fixed by the constraint; draws are repeated until a_n stays in the
    sampling box and the series ratio prod b / prod a is below 1.
    """
    for _ in range(MAX_REDRAWS):
        q = g.uniform(1.1, 2.0)
        a = _loguniform(g, n - 1)
        b = _loguniform(g, n)
        an = math.sqrt(q) ** (n - 1) / math.prod(a)
        if not 0.5 <= an <= 2.0:
            continue
        a = a + [an]
        if math.prod(b) / math.prod(a) >= 0.9:
            continue
        if min(abs(a[i] / a[j] - 1) for i in range(n) for j in range(n) if i != j) < 1e-2:
            continue
        if min(abs(a[0] / bj - 1) for bj in b) < 1e-2:
            continue
        conv = lambda v: num.scalar(v, mp)
        qs = conv(q)
        head = [conv(v) for v in a[:-1]]
        tail = num.sqrt(qs) ** (n - 1) / math.prod(head)
        return QPnnParams(n, qs, head + [tail], [conv(v) for v in b])
    raise RuntimeError("could not draw constrained parameters")
