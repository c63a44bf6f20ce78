"""The discrete system of order (n, n): states, steppers, residuals and Weyl actions.

Conventions.  A state at time ``t`` carries ``x_1..x_n`` and ``y_1..y_n``;
the boundary values ``x_0 = t x_n`` and ``y_0 = y_n / (q t)`` are derived on
demand.  Below, ``X`` and ``Y`` denote the coordinates at time ``q t``.

Every equation of the system is a cyclic chain

    c_j = alpha_j u_j / (1 + s_j u_j) - beta_j u_{j-1} / (1 + s_j u_{j-1}),
    u_0 = lam * u_n,

in one set of unknowns while the other set enters linearly.  Forward
stepping solves the x-chain for ``X`` and then a telescoping linear system
for ``Y``; backward stepping solves the y-chain for ``y`` and then a linear
system for ``x``.  Each chain link is a Moebius map, so their composition
turns the chain into a fixed-point quadratic with exactly two roots.  The
product relation selects the root, and Newton polishes it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import _numeric as num
from .errors import (
    ConvergenceError,
    DegenerateSystemError,
    SingularConfigurationError,
    SingularJacobianError,
)

DEFAULT_MAX_ITER = 50
MAX_HALVINGS = 8


def _default_tol(*values) -> float:
    return 1e-13 if not num.is_mp(*values) else float(num.eps_of(*values)) * 1e3


def _guard(value, where: str, scale=1.0, step: int | None = None, cls=SingularConfigurationError):
    """Raise when ``value`` is zero up to roundoff relative to ``scale``."""
    if abs(value) <= 64 * num.eps_of(value) * max(1.0, float(abs(scale))):
        raise cls(where, value, step)
    return value


@dataclass(frozen=True)
class QPnnParams:
    n: int
    q: complex
    a: tuple
    b: tuple
    sqrt_q: complex | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if len(self.a) != self.n or len(self.b) != self.n:
            raise ValueError("a and b must each have n entries")
        mp = num.is_mp(self.q, self.a, self.b, self.sqrt_q)
        q = num.scalar(self.q, mp)
        if abs(q) <= 1:
            raise ValueError(f"|q| must exceed 1, got {q!r}")
        a = tuple(num.scalar(v, mp) for v in self.a)
        b = tuple(num.scalar(v, mp) for v in self.b)
        if any(v == 0 for v in a + b):
            raise ValueError("all a_j and b_j must be nonzero")
        s = num.sqrt(q)
        if self.sqrt_q is not None:
            # the given root only selects the branch; recompute it at working precision
            given = num.scalar(self.sqrt_q, mp)
            if abs(given * given - q) > 1e-10 * abs(q):
                raise ValueError("sqrt_q is not a square root of q")
            if abs(s - given) > abs(s + given):
                s = -s
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "sqrt_q", s)

    @property
    def mp(self) -> bool:
        return num.is_mp(self.q)

    @property
    def b0(self):
        return self.b[-1] / self.q

    @property
    def relation_constant(self):
        """q^{(n-1)/2} on the fixed square-root branch."""
        return self.sqrt_q ** (self.n - 1)

    def bb(self, j: int):
        """b_j for 0 <= j <= n with the boundary convention b_0 = b_n / q."""
        return self.b0 if j == 0 else self.b[j - 1]

    def with_ab(self, a: Sequence, b: Sequence) -> "QPnnParams":
        return replace(self, a=tuple(a), b=tuple(b))


@dataclass(frozen=True)
class QPnnState:
    t: complex
    x: tuple
    y: tuple

    def __post_init__(self):
        mp = num.is_mp(self.t, self.x, self.y)
        t = num.scalar(self.t, mp)
        if t == 0:
            raise ValueError("t = 0 is not allowed")
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have equal length")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", tuple(num.scalar(v, mp) for v in self.x))
        object.__setattr__(self, "y", tuple(num.scalar(v, mp) for v in self.y))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def x0(self):
        return self.t * self.x[-1]

    def y0(self, q):
        return self.y[-1] / (q * self.t)

    def xx(self, j: int):
        return self.x0 if j == 0 else self.x[j - 1]

    def yy(self, j: int, q):
        return self.y0(q) if j == 0 else self.y[j - 1]

    def distance(self, other: "QPnnState") -> float:
        """Max-abs coordinate difference (time included)."""
        d = [self.t - other.t, *(u - v for u, v in zip(self.x, other.x)),
             *(u - v for u, v in zip(self.y, other.y))]
        return num.maxabs(d)


@dataclass(frozen=True)
class StepPair:
    at_t: QPnnState
    at_qt: QPnnState

    def check_times(self, q) -> None:
        t0, t1 = self.at_t.t, self.at_qt.t
        if abs(t1 - q * t0) > 1e3 * num.eps_of(t0) * abs(t1):
            raise ValueError("slice times are not related by the shift q")


@dataclass
class StepInfo:
    """Diagnostics of one step; ``max_residual`` is scaled by the largest coordinate."""

    relation_residual: float
    max_residual: float
    iterations: int = 0
    trace: list = field(default_factory=list)
    method: str = ""


# ---------------------------------------------------------------------------
# residuals


def residual_system(params: QPnnParams, pair: StepPair) -> list:
    """The 2n equation defects followed by the product-relation defect."""
    n, q, a = params.n, params.q, params.a
    s0, s1 = pair.at_t, pair.at_qt
    t = s0.t
    Xv = lambda j: q * t * s1.x[-1] if j == 0 else s1.x[j - 1]
    Yv = lambda j: s1.y[-1] / (q * q * t) if j == 0 else s1.y[j - 1]
    y = lambda j: s0.yy(j, q)

    def den(j, k, label):
        d = 1 + Xv(j) * y(k)
        return _guard(d, f"1 + x_{j}(qt) y_{k}(t) [{label}]", 1 + abs(Xv(j) * y(k)))

    out = []
    for j in range(1, n + 1):
        rhs = a[j - 1] * Xv(j) / den(j, j - 1, "x-eq") - params.bb(j - 1) * Xv(j - 1) / den(j - 1, j - 1, "x-eq")
        out.append(s0.xx(j) - s0.xx(j - 1) - rhs)
    for j in range(1, n + 1):
        rhs = params.b[j - 1] * y(j) / den(j, j, "y-eq") - a[j - 1] * y(j - 1) / den(j, j - 1, "y-eq")
        out.append(Yv(j) - Yv(j - 1) - rhs)
    out.append(relation_value(params, s1.x, s0) - params.relation_constant)
    return out


def relation_value(params: QPnnParams, X: Sequence, state: QPnnState):
    """prod_j a_j (1 + X_j y_j) / (1 + X_j y_{j-1}) for the slice ``state``."""
    q = params.q
    out = 1
    for j in range(1, params.n + 1):
        out *= params.a[j - 1] * (1 + X[j - 1] * state.yy(j, q)) / (1 + X[j - 1] * state.yy(j - 1, q))
    return out


def equation_residual(params: QPnnParams, pair: StepPair) -> float:
    """Max |defect| over the 2n difference equations (relation excluded)."""
    return num.maxabs(residual_system(params, pair)[:-1])


def relation_residual(params: QPnnParams, pair: StepPair) -> float:
    return float(abs(residual_system(params, pair)[-1]))


# ---------------------------------------------------------------------------
# cyclic chain machinery


@dataclass
class _Chain:
    alpha: list
    beta: list
    sigma: list
    c: list
    lam: complex

    @property
    def n(self) -> int:
        return len(self.c)

    def prev(self, u, j):
        return self.lam * u[-1] if j == 0 else u[j - 1]

    def residual(self, u) -> list:
        out = []
        for j in range(self.n):
            up = self.prev(u, j)
            f = self.alpha[j] * u[j] / (1 + self.sigma[j] * u[j])
            g = self.beta[j] * up / (1 + self.sigma[j] * up)
            out.append(f - g - self.c[j])
        return out

    def scale(self, u) -> float:
        s = 1.0
        for j in range(self.n):
            up = self.prev(u, j)
            s = max(s, float(abs(self.c[j])),
                    float(abs(self.alpha[j] * u[j] / (1 + self.sigma[j] * u[j]))),
                    float(abs(self.beta[j] * up / (1 + self.sigma[j] * up))))
        return s

    def jacobian(self, u) -> np.ndarray:
        n = self.n
        J = num.zeros((n, n), self.c)
        for j in range(n):
            J[j, j] += self.alpha[j] / (1 + self.sigma[j] * u[j]) ** 2
            up = self.prev(u, j)
            d = self.beta[j] / (1 + self.sigma[j] * up) ** 2
            if j == 0:
                J[j, n - 1] -= self.lam * d
            else:
                J[j, j - 1] -= d
        return J

    def links(self) -> list:
        return [
            np.array([[1, 0], [-s, al]], dtype=object)
            @ np.array([[1, cj], [0, 1]], dtype=object)
            @ np.array([[be, 0], [s, 1]], dtype=object)
            for al, be, s, cj in zip(self.alpha, self.beta, self.sigma, self.c)
        ]

    def moebius_roots(self) -> list:
        """Both solutions of the chain, from the fixed points of the composed map."""
        mus = self.links()
        T = np.array([[self.lam, 0], [0, 1]], dtype=object)
        for m in mus:
            T = m @ T
        A, B, C, D = T[0, 0], T[0, 1], T[1, 0], T[1, 1]
        # C u^2 + (D - A) u - B = 0
        scale = max(abs(A), abs(B), abs(C), abs(D))
        lasts = []
        if abs(C) <= 1e-14 * scale:
            if abs(D - A) > 1e-14 * scale:
                lasts.append(B / (D - A))
        else:
            disc = num.sqrt((D - A) ** 2 + 4 * C * B)
            bq = D - A
            r1 = (-bq - disc) / (2 * C) if abs(-bq - disc) >= abs(-bq + disc) else (-bq + disc) / (2 * C)
            lasts.append(r1)
            if r1 != 0:
                lasts.append(-B / (C * r1))
            else:
                lasts.append(-bq / C)
        out = []
        for un in lasts:
            cur = self.lam * un
            u = []
            ok = True
            for m in mus:
                d = m[1, 0] * cur + m[1, 1]
                if d == 0:
                    ok = False
                    break
                cur = (m[0, 0] * cur + m[0, 1]) / d
                u.append(cur)
            if ok:
                u[-1] = un
                out.append(u)
        return out

    def newton(self, u0, tol: float, max_iter: int, step: int | None = None):
        # overflow in a diverging trial step only makes that trial rejected
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return self._newton(list(u0), tol, max_iter, step)

    def _newton(self, u, tol, max_iter, step):
        try:
            F = self.residual(u)
        except ZeroDivisionError:
            raise SingularConfigurationError("chain denominator at the initial guess", step=step)
        r = num.maxabs(F)
        trace = [r]
        for it in range(max_iter):
            if r <= tol * self.scale(u):
                return u, trace
            try:
                du = num.solve(self.jacobian(u), num.vector(F, self_mp(u)))
            except (np.linalg.LinAlgError, ZeroDivisionError) as exc:
                raise SingularJacobianError(f"singular Jacobian ({exc})", trace, step)
            lam = 1.0
            for _ in range(MAX_HALVINGS + 1):
                trial = [ui - lam * di for ui, di in zip(u, du)]
                try:
                    Ft = self.residual(trial)
                    rt = num.maxabs(Ft)
                except ZeroDivisionError:
                    rt = float("inf")
                if rt < r:
                    break
                lam /= 2
            else:
                # no decrease: accept if already at roundoff level
                if r <= 1e2 * tol * self.scale(u):
                    return u, trace
                raise ConvergenceError("damped Newton stalled", trace, step)
            u, F, r = trial, Ft, rt
            trace.append(r)
        if r <= tol * self.scale(u):
            return u, trace
        raise ConvergenceError(f"Newton did not converge in {max_iter} iterations", trace, step)


def self_mp(u) -> bool:
    return num.is_mp(list(u))


def _forward_chain(params: QPnnParams, s: QPnnState) -> _Chain:
    q, t, n = params.q, s.t, params.n
    return _Chain(
        alpha=list(params.a),
        beta=[params.bb(j) for j in range(n)],
        sigma=[s.yy(j, q) for j in range(n)],
        c=[s.xx(j) - s.xx(j - 1) for j in range(1, n + 1)],
        lam=q * t,
    )


def _backward_chain(params: QPnnParams, S: QPnnState) -> _Chain:
    """y-chain for the earlier slice; ``S`` is the later slice at time q t."""
    q, n = params.q, params.n
    t = S.t / q
    Yv = lambda j: S.y[-1] / (q * q * t) if j == 0 else S.y[j - 1]
    return _Chain(
        alpha=list(params.b),
        beta=list(params.a),
        sigma=list(S.x),
        c=[Yv(j) - Yv(j - 1) for j in range(1, n + 1)],
        lam=1 / (q * t),
    )


def _telescope(R: Sequence, kappa, where: str, step=None) -> list:
    """Solve v_j - v_{j-1} = R_j with v_0 = kappa v_n."""
    _guard(1 - kappa, where, 1 + abs(kappa), step, DegenerateSystemError)
    vn = sum(R) / (1 - kappa)
    out, prev = [], kappa * vn
    for r in R:
        prev = prev + r
        out.append(prev)
    out[-1] = vn
    return out


def _solve_Y(params: QPnnParams, s: QPnnState, X: Sequence, step=None) -> list:
    q, t, n = params.q, s.t, params.n
    R = []
    for j in range(1, n + 1):
        d1 = _guard(1 + X[j - 1] * s.yy(j, q), f"1 + x_{j}(qt) y_{j}(t)", step=step)
        d0 = _guard(1 + X[j - 1] * s.yy(j - 1, q), f"1 + x_{j}(qt) y_{j - 1}(t)", step=step)
        R.append(params.b[j - 1] * s.yy(j, q) / d1 - params.a[j - 1] * s.yy(j - 1, q) / d0)
    return _telescope(R, 1 / (q * q * t), "1 - q^-2 t^-1 (linear y-system)", step)


def _solve_x(params: QPnnParams, S: QPnnState, y: Sequence, step=None) -> list:
    q, n = params.q, params.n
    t = S.t / q
    s = QPnnState(t, [0] * n, y)
    Xv = lambda j: q * t * S.x[-1] if j == 0 else S.x[j - 1]
    R = []
    for j in range(1, n + 1):
        d1 = _guard(1 + Xv(j) * s.yy(j - 1, q), f"1 + x_{j}(qt) y_{j - 1}(t)", step=step)
        d0 = _guard(1 + Xv(j - 1) * s.yy(j - 1, q), f"1 + x_{j - 1}(qt) y_{j - 1}(t)", step=step)
        R.append(params.a[j - 1] * Xv(j) / d1 - params.bb(j - 1) * Xv(j - 1) / d0)
    return _telescope(R, t, "1 - t (linear x-system)", step)


def _relation_defect_fwd(params, s, X) -> float:
    try:
        return float(abs(relation_value(params, X, s) - params.relation_constant))
    except ZeroDivisionError:
        return float("inf")


def _solve_branch(chain: _Chain, score: Callable, guess, tol, max_iter, step):
    if guess is not None:
        u, trace = chain.newton(list(guess), tol, max_iter, step)
        return u, trace, "newton-guess"
    seeds = chain.moebius_roots()
    if not seeds:
        raise SingularConfigurationError("fixed-point quadratic of the chain", step=step)
    best = None
    failures = []
    for seed in seeds:
        try:
            u, trace = chain.newton(seed, tol, max_iter, step)
        except ConvergenceError as exc:
            failures.append(exc)
            continue
        sc = score(u)
        if best is None or sc < best[0]:
            best = (sc, u, trace)
    if best is None:
        raise failures[0]
    return best[1], best[2], "moebius+newton"


# ---------------------------------------------------------------------------
# steppers


def step_newton(params: QPnnParams, state: QPnnState, guess: Sequence | None = None, *,
                tol: float | None = None, max_iter: int = DEFAULT_MAX_ITER,
                full_output: bool = False, step: int | None = None):
    """Advance ``state`` from t to q t for any n >= 2.

    Without ``guess`` both chain roots are polished by Newton and the one
    that satisfies the product relation is kept.  With ``guess``, Newton runs
    from that point alone and the result is returned whatever its relation
    defect.
    """
    tol = _default_tol(state.t) if tol is None else tol
    chain = _forward_chain(params, state)
    X, trace, method = _solve_branch(
        chain, lambda X: _relation_defect_fwd(params, state, X), guess, tol, max_iter, step
    )
    Y = _solve_Y(params, state, X, step)
    new = QPnnState(params.q * state.t, X, Y)
    if not full_output:
        return new
    return new, _info(params, StepPair(state, new), len(trace) - 1, trace, method)


def step_backward(params: QPnnParams, state: QPnnState, guess: Sequence | None = None, *,
                  tol: float | None = None, max_iter: int = DEFAULT_MAX_ITER,
                  full_output: bool = False, step: int | None = None):
    """Recover the slice at t / q from the slice ``state`` at t."""
    tol = _default_tol(state.t) if tol is None else tol
    chain = _backward_chain(params, state)
    t = state.t / params.q

    def score(y):
        s = QPnnState(t, [0] * params.n, y)
        return _relation_defect_fwd(params, s, state.x)

    y, trace, method = _solve_branch(chain, score, guess, tol, max_iter, step)
    x = _solve_x(params, state, y, step)
    prev = QPnnState(t, x, y)
    if not full_output:
        return prev
    return prev, _info(params, StepPair(prev, state), len(trace) - 1, trace, method)


def step_n2(params: QPnnParams, state: QPnnState, *, full_output: bool = False, step: int | None = None):
    """Closed-form forward step for n = 2."""
    if params.n != 2:
        raise ValueError("step_n2 requires n = 2")
    q, t, sq = params.q, state.t, params.sqrt_q
    (a1, a2), (b1, _) = params.a, params.b
    (x1, x2), (y1, y2) = state.x, state.y
    c = a1 * b1 * sq * t
    xi3 = a1 * sq * t * (x2 - x1) * (y2 - y1) - q * t + a1 * a2 * sq * t
    xi4 = (x2 - x1) * (y2 - q * t * y1) - b1 * (q * t - a1 * a2 * sq * t)
    d1 = xi3 * y1 + (q * t - c) * y1 - (1 - c) * y2
    d2 = xi4 * y1 + a2 * (q * t - c) * y1 - a2 * (1 - c) * y2
    _guard(d1, "denominator of x_1(qt)", abs(xi3 * y1) + abs(y2) + abs(y1), step)
    _guard(d2, "denominator of x_2(qt)", abs(xi4 * y1) + abs(y2) + abs(y1), step)
    X = [-xi3 / d1, -xi4 / d2]
    Y = _solve_Y(params, state, X, step)
    new = QPnnState(q * t, X, Y)
    if not full_output:
        return new
    return new, _info(params, StepPair(state, new), 0, [], "closed-form")


def _info(params, pair, iterations, trace, method) -> StepInfo:
    res = residual_system(params, pair)
    coords = [*pair.at_t.x, *pair.at_t.y, *pair.at_qt.x, *pair.at_qt.y]
    return StepInfo(
        relation_residual=float(abs(res[-1])),
        max_residual=num.maxabs(res[:-1]) / max(1.0, num.maxabs(coords)),
        iterations=iterations,
        trace=list(trace),
        method=method,
    )


def step(params: QPnnParams, state: QPnnState, *, newton: bool = False, **kw):
    """Default forward step: closed form for n = 2 unless ``newton``."""
    if params.n == 2 and not newton:
        return step_n2(params, state, full_output=kw.pop("full_output", False), step=kw.pop("step", None))
    return step_newton(params, state, **kw)


@dataclass
class Orbit:
    states: list
    relation_residuals: list
    max_residuals: list

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def __iter__(self):
        return iter(self.states)


def orbit(params: QPnnParams, state: QPnnState, steps: int, *, newton: bool = False,
          tol: float | None = None, full_output: bool = False):
    """Iterate forward (steps > 0) or backward (steps < 0).

    The returned states are in order of computation, starting with ``state``.
    Per-step diagnostics refer to the pair formed by consecutive states.
    """
    states = [state]
    rels, maxes = [], []
    cur = state
    for k in range(abs(steps)):
        if steps > 0:
            if params.n == 2 and not newton:
                nxt, info = step_n2(params, cur, full_output=True, step=k + 1)
            else:
                nxt, info = step_newton(params, cur, tol=tol, full_output=True, step=k + 1)
        else:
            nxt, info = step_backward(params, cur, tol=tol, full_output=True, step=k + 1)
        rels.append(info.relation_residual)
        maxes.append(info.max_residual)
        states.append(nxt)
        cur = nxt
    if full_output:
        return Orbit(states, rels, maxes)
    return states


# ---------------------------------------------------------------------------
# Weyl group actions


def weyl_apply(j: int, params: QPnnParams, state: QPnnState) -> tuple[QPnnParams, QPnnState]:
    """Apply the generator r_j (0 <= j <= 2n-1) to parameters and one time slice."""
    n, q = params.n, params.q
    if not 0 <= j < 2 * n:
        raise ValueError(f"generator index must lie in 0..{2 * n - 1}")
    a, b = list(params.a), list(params.b)
    x, y = list(state.x), list(state.y)
    t = state.t
    if j == 0:
        den = state.x[0] - state.x0
        _guard(den, "x_1(t) - t x_n(t) (r_0)", abs(state.x[0]) + abs(state.x0))
        a[0], b[-1] = params.b0, q * params.a[0]
        y[-1] = y[-1] + q * t * (params.b0 - params.a[0]) / den
    elif j % 2 == 0:
        k = j // 2 + 1  # r_{2k-2}
        den = state.x[k - 1] - state.x[k - 2]
        _guard(den, f"x_{k}(t) - x_{k - 1}(t) (r_{j})", abs(state.x[k - 1]) + abs(state.x[k - 2]))
        a[k - 1], b[k - 2] = params.b[k - 2], params.a[k - 1]
        y[k - 2] = y[k - 2] + (params.b[k - 2] - params.a[k - 1]) / den
    else:
        k = (j + 1) // 2  # r_{2k-1}
        yk, ykm = state.yy(k, q), state.yy(k - 1, q)
        den = yk - ykm
        _guard(den, f"y_{k}(t) - y_{k - 1}(t) (r_{j})", abs(yk) + abs(ykm))
        a[k - 1], b[k - 1] = params.b[k - 1], params.a[k - 1]
        x[k - 1] = x[k - 1] + (params.a[k - 1] - params.b[k - 1]) / den
    return params.with_ab(a, b), QPnnState(t, x, y)


def weyl_word(word: Sequence[int], params: QPnnParams, state: QPnnState):
    """Apply r_{word[0]} first, then r_{word[1]}, and so on."""
    for j in word:
        params, state = weyl_apply(j, params, state)
    return params, state


def weyl_apply_pair(j: int, params: QPnnParams, pair: StepPair) -> tuple[QPnnParams, StepPair]:
    p1, s0 = weyl_apply(j, params, pair.at_t)
    _, s1 = weyl_apply(j, params, pair.at_qt)
    return p1, StepPair(s0, s1)


def _deviation(p0: QPnnParams, s0: QPnnState, p1: QPnnParams, s1: QPnnState) -> float:
    """Relative max deviation of (params, state) pairs."""
    u = [*p0.a, *p0.b, *s0.x, *s0.y]
    v = [*p1.a, *p1.b, *s1.x, *s1.y]
    scale = max(1.0, num.maxabs(u))
    return num.maxabs([ui - vi for ui, vi in zip(u, v)]) / scale


@dataclass
class WeylReport:
    involution: dict
    braid: dict
    commute: dict

    @property
    def max_involution(self) -> float:
        return max(self.involution.values())

    @property
    def max_braid(self) -> float:
        return max(self.braid.values())

    @property
    def max_commute(self) -> float:
        return max(self.commute.values()) if self.commute else 0.0

    def ok(self, tol: float) -> bool:
        return max(self.max_involution, self.max_braid, self.max_commute) <= tol


def adjacent(i: int, j: int, n: int) -> bool:
    """Adjacency of nodes i, j on the cyclic Dynkin diagram with 2n nodes."""
    return (i - j) % (2 * n) in (1, 2 * n - 1)


def weyl_verify(params: QPnnParams, state: QPnnState, tol: float | None = None) -> WeylReport:
    """Measure the Coxeter relations of the cyclic group with 2n generators."""
    N = 2 * params.n

    def run(word):
        try:
            return _deviation(params, state, *weyl_word(word, params, state))
        except SingularConfigurationError as exc:
            raise SingularConfigurationError(f"{exc.where} in word {list(word)}", exc.value) from exc

    inv = {f"r{j}^2": run([j, j]) for j in range(N)}
    braid = {f"(r{j} r{(j + 1) % N})^3": run([j, (j + 1) % N] * 3) for j in range(N)}
    comm = {}
    for i in range(N):
        for j in range(i + 1, N):
            if not adjacent(i, j, params.n):
                comm[f"(r{i} r{j})^2"] = run([i, j, i, j])
    report = WeylReport(inv, braid, comm)
    return report
