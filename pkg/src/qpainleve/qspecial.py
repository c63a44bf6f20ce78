"""q-series primitives: q-shifted factorials and the basic hypergeometric series.

Nothing here assumes the sign convention of the q-difference systems; every
series carries its own base.  The systems in this package use a shift base
``q`` with ``|q| > 1`` and expand their series in the convergent base
``p = 1/q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from . import _numeric as num
from .errors import ResonanceError

DEFAULT_TRUNCATION = 60


@dataclass(frozen=True)
class QBase:
    """Shift base ``q`` (|q| > 1) with its convergent reciprocal ``p``."""

    q: complex

    def __post_init__(self):
        if self.q == 0 or abs(self.q) <= 1:
            raise ValueError(f"shift base must satisfy |q| > 1, got {self.q!r}")

    @property
    def p(self):
        return 1 / self.q

    @property
    def eps(self):
        """``1 - q``, the step of the q-Laplace substitutions."""
        return 1 - self.q


@dataclass(frozen=True)
class PhiSpec:
    """Truncated series n_phi_{n-1}(uppers; lowers; base, argument).

    ``uppers`` has n entries, ``lowers`` has n - 1 entries and ``|base| < 1``.
    """

    uppers: tuple
    lowers: tuple
    base: complex
    argument: complex
    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        object.__setattr__(self, "uppers", tuple(self.uppers))
        object.__setattr__(self, "lowers", tuple(self.lowers))
        if len(self.lowers) != len(self.uppers) - 1:
            raise ValueError("need exactly one fewer lower parameter than upper parameters")
        if abs(self.base) >= 1:
            raise ValueError(f"series base must satisfy |base| < 1, got {self.base!r}")
        if self.truncation < 1:
            raise ValueError("truncation must be a positive integer")

    @property
    def order(self) -> int:
        return len(self.uppers)

    def with_truncation(self, K: int) -> "PhiSpec":
        return PhiSpec(self.uppers, self.lowers, self.base, self.argument, K)

    def with_argument(self, t) -> "PhiSpec":
        return PhiSpec(self.uppers, self.lowers, self.base, t, self.truncation)


def q_pochhammer(alpha, q, k: int):
    """(alpha; q)_k = prod_{i<k} (1 - q^i alpha)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = 1
    qi = 1
    for _ in range(k):
        out *= 1 - qi * alpha
        qi *= q
    return out


def q_pochhammer_inf(alpha, p, tol: float = 1e-16, max_terms: int = 100_000):
    """(alpha; p)_infinity for |p| < 1.

    The product stops once the remaining factors are guaranteed to change it
    by a relative amount below ``tol``: for the tail starting at index K,
    |prod - 1| <= exp(|alpha| |p|^K / (1 - |p|)) - 1.
    """
    ap = abs(p)
    if ap >= 1:
        raise ValueError(f"infinite q-product needs |p| < 1, got |p| = {ap}")
    aa = abs(alpha)
    out = 1
    pk = 1
    for k in range(max_terms):
        bound = math.expm1(aa * abs(pk) / (1 - ap)) if aa else 0.0
        if bound < tol:
            return out
        out *= 1 - pk * alpha
        if out == 0:
            return out
        pk *= p
    raise RuntimeError("q_pochhammer_inf did not reach tolerance")


def _phi_terms(spec: PhiSpec) -> list:
    base, t = spec.base, spec.argument
    term = num.scalar(1, num.is_mp(base, t, *spec.uppers, *spec.lowers))
    terms = [term]
    bk = 1  # base**k
    for k in range(spec.truncation):
        den = 1 - bk * base  # (base; base) ratio factor 1 - base^{k+1}
        for i, beta in enumerate(spec.lowers):
            f = 1 - bk * beta
            if f == 0:
                raise ResonanceError(f"lower parameter {i + 1} hits base^(-{k})", k=k + 1)
            den *= f
        numer = 1
        for alpha in spec.uppers:
            numer *= 1 - bk * alpha
        term = term * numer / den * t
        terms.append(term)
        bk *= base
    return terms


def nphi(spec: PhiSpec):
    """Value of the truncated series sum_{k=0}^{K} term_k."""
    return sum(_phi_terms(spec))


def nphi_with_tail(spec: PhiSpec):
    """Series value together with a crude geometric tail estimate.

    The tail estimate uses the largest modulus ratio among the last few
    consecutive terms; it is ``inf`` when that ratio is not below one.
    """
    terms = _phi_terms(spec)
    value = sum(terms)
    last = [abs(x) for x in terms[-6:]]
    ratios = [b / a for a, b in zip(last, last[1:]) if a]
    if not ratios:
        return value, 0.0
    rho = float(max(ratios))
    tail = float(last[-1]) * rho / (1 - rho) if rho < 1 else math.inf
    return value, tail


def hg_operator_coefficients(spec: PhiSpec) -> tuple[list, list]:
    """Shift-polynomial coefficients of the n-th order operator annihilating n_phi_{n-1}.

    The operator is
        (1 - beta_1/base T)...(1 - beta_{n-1}/base T)(1 - T) - t (1 - alpha_1 T)...(1 - alpha_n T),
    with T f(t) = f(base t).  Returns (c, d) so that the operator applied to f
    at t equals sum_m c[m] f(base^m t) - t sum_m d[m] f(base^m t).
    """

    def expand(roots):
        poly = [1]
        for r in roots:
            nxt = [0] * (len(poly) + 1)
            for m, c in enumerate(poly):
                nxt[m] += c
                nxt[m + 1] -= r * c
            poly = nxt
        return poly

    c = expand([beta / spec.base for beta in spec.lowers] + [1])
    d = expand(list(spec.uppers))
    return c, d


def hg_operator_residual(spec: PhiSpec, sample: Callable, t, relative: bool = False):
    """Apply the annihilating operator of ``spec``'s series to ``sample`` at ``t``.

    With ``relative=True`` the residual is divided by the sum of the moduli of
    the individual terms, which is the natural cancellation scale.
    """
    c, d = hg_operator_coefficients(spec)
    values = []
    tm = t
    for _ in range(len(c)):
        values.append(sample(tm))
        tm = tm * spec.base
    terms = [(cm - t * dm) * v for cm, dm, v in zip(c, d, values)]
    res = sum(terms)
    if not relative:
        return res
    scale = sum(abs(cm) * abs(v) for cm, v in zip(c, values)) + sum(
        abs(t * dm) * abs(v) for dm, v in zip(d, values)
    )
    return abs(res) / scale if scale else abs(res)


def phi_sampler(spec: PhiSpec) -> Callable:
    """t -> truncated series of ``spec`` at argument t (all other data fixed)."""

    def f(t):
        return nphi(spec.with_argument(t))

    return f


def direct_sum(uppers: Sequence, lowers: Sequence, base, t, K: int):
    """Term-by-term summation from explicit q-Pochhammer products.

    Slow and independent of the ratio recursion in :func:`nphi`; kept as a
    cross-check.
    """
    total = 0
    for k in range(K + 1):
        numer = 1
        for a in uppers:
            numer *= q_pochhammer(a, base, k)
        den = q_pochhammer(base, base, k)
        for b in lowers:
            den *= q_pochhammer(b, base, k)
        total += numer / den * t**k
    return total
