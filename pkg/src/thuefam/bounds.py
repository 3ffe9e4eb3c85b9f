"""Closed-form bounds: Matveev, log|y| from above and below, and the n crossover.

Exact quantities are returned as ``int``/``Fraction``. Transcendental ones are
evaluated as balls and returned as ``mpf`` rounded in the safe direction
(upper bounds up, lower bounds down).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import UsageError
from .numerics import PrecReal, with_precision

_PREC = 128

MATVEEV_CONSTANT = Fraction(14 * 10**10)  # 1.4e11
UPPER_LOGY_CONSTANT = 366 * 10**14  # 3.66e16
J12_DENOMINATOR = Fraction(57 * 10**11)  # 5.7e12

PUBLISHED_C1 = Fraction(274 * 10**14)  # 2.74e16
PUBLISHED_C2 = Fraction(113 * 10**10)  # 1.13e12


@dataclass(frozen=True)
class MatveevInput:
    D: int
    A1: Fraction
    A2: Fraction
    A3: Fraction
    B: Fraction = Fraction(1)

    def __post_init__(self):
        if self.D < 1:
            raise UsageError("field degree D must be positive")
        for a in (self.A1, self.A2, self.A3):
            if Fraction(a) < Fraction(16, 100):
                raise UsageError("each A_i must be at least 0.16")
        if Fraction(self.B) < 1:
            raise UsageError("B must be at least 1")


def _ball(x, p=_PREC) -> PrecReal:
    return x if isinstance(x, PrecReal) else PrecReal.exact(Fraction(x), p)


def matveev_coefficient(D: int, A1, A2, A3, prec_bits: int = _PREC) -> PrecReal:
    """1.4e11 D^2 log(eD) A1 A2 A3, the factor in front of log(eB)."""
    log_eD = 1 + PrecReal.exact(D, prec_bits).log()
    return MATVEEV_CONSTANT * D * D * log_eD * _ball(A1) * _ball(A2) * _ball(A3)


def matveev_lower_bound(inp: MatveevInput) -> mpmath.mpf:
    """Lower bound for log|Lambda|: -1.4e11 D^2 log(eD) log(eB) A1 A2 A3 (rounded down)."""
    coef = matveev_coefficient(inp.D, inp.A1, inp.A2, inp.A3)
    log_eB = 1 + _ball(inp.B).log()
    return (-(coef * log_eB)).lower_mpf()


def constant_C1() -> PrecReal:
    """Coefficient behind log|y| < 3.66e16 n^3: D = 6, heights 1.7n, 2.3n, 2.3n scaled by D."""
    return matveev_coefficient(6, Fraction(6 * 17, 10), Fraction(6 * 23, 10), Fraction(6 * 23, 10))


def constant_C2() -> PrecReal:
    """Coefficient for the linear form in log 2, log phi, log sqrt5 (D = 2)."""
    return matveev_coefficient(2, Fraction(14, 10), Fraction(1, 2), Fraction(17, 10))


def resolve_log_bound(c, a) -> mpmath.mpf:
    """2c(a + log c): any x >= 1 with x < c(a + log x) lies below it."""
    c, a = Fraction(c), Fraction(a)
    if c < 1 or a < 2:
        raise UsageError("resolve_log_bound needs c >= 1 and a >= 2")
    cb = _ball(c)
    return (2 * cb * (a + cb.log())).upper_mpf()


def upper_bound_logy(n: int) -> int:
    """3.66e16 n^3 (exact), valid for n >= 29."""
    if n < 29:
        raise UsageError("the upper bound for log|y| needs n >= 29")
    return UPPER_LOGY_CONSTANT * n ** 3


def bound_u(n: int, log_y):
    """2 log|y| / n + 2, a bound on max(|u1|, |u2|).

    Exact (Fraction) for rational ``log_y``; otherwise an ``mpf`` rounded up.
    """
    if log_y < 0:
        raise UsageError("log_y must be non-negative")
    if isinstance(log_y, (int, Fraction)):
        return 2 * Fraction(log_y) / n + 2
    return (2 * _ball(log_y) / n + 2).upper_mpf()


def log_lower_bound_logy(n: int, j: int, prec_bits: int = _PREC) -> PrecReal:
    """Logarithm of the lower bound for log|y| (type j, n > 1000)."""
    if n <= 1000:
        raise UsageError("the lower bounds for log|y| need n > 1000")
    if j == 3:
        return n * PrecReal.exact(Fraction(6, 5), prec_bits).log()
    if j in (1, 2):
        return n / J12_DENOMINATOR - PrecReal.exact(n, prec_bits).log() - 4
    raise UsageError("type j must be 1, 2 or 3")


def lower_bound_logy(n: int, j: int) -> mpmath.mpf:
    """1.2^n for j = 3; exp(n / 5.7e12 - log n - 4) for j in {1, 2}; rounded down."""
    return log_lower_bound_logy(n, j).exp().lower_mpf()


def _crossed(n: int, j: int) -> bool:
    """Certified: lower bound for log|y| exceeds 3.66e16 n^3 (compared as logarithms)."""

    def attempt(p):
        lhs = log_lower_bound_logy(n, j, p)
        rhs = PrecReal.exact(upper_bound_logy(n), p).log()
        return lhs > rhs

    return with_precision(attempt, _PREC)


def _least_crossing(j: int, start: int = 1001) -> int:
    if _crossed(start, j):
        return start
    lo, step = start, 1
    while True:
        hi = lo + step
        if _crossed(hi, j):
            break
        lo, step = hi, step * 2
    # predicate is False at lo, True at hi; the gap only widens past the crossing
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _crossed(mid, j):
            hi = mid
        else:
            lo = mid
    return hi


def absolute_bound_n() -> tuple:
    """(n_j3, n_j12): least n > 1000 where the type-specific lower bound beats the upper one."""
    return _least_crossing(3), _least_crossing(1)
