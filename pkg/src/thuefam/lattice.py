"""Exact 3x3 LLL and the lattice lower bound for x1 log2 + x2 log phi + x3 log sqrt5.

Everything after the nearest-integer step is exact: integer bases, rational
Gram-Schmidt data, and a rational lower bound for |Lambda|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .bounds import absolute_bound_n
from .errors import GateFailed, InsufficientPrecision, PrecisionCapExceeded, UsageError
from .numerics import PREC_CAP, PrecReal, real_const

DELTA = Fraction(3, 4)
M_COEFF = Fraction(22 * 10**16)  # M(n) = 2.2e17 n^3
BOUND_COEFF = Fraction(366 * 10**14)  # 3.66e16 0.82^n n
BOUND_BASE = Fraction(82, 100)
C_SEARCH_SPAN = 50
TARGET_N = 1000


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class LatticeBasis3:
    """Column basis; ``transform`` (if set) maps the input basis to this one."""

    columns: tuple
    transform: tuple | None = None

    def matrix(self) -> tuple:
        """Row-major view."""
        return tuple(tuple(c[r] for c in self.columns) for r in range(3))

    def determinant(self) -> int:
        (a, b, c), (d, e, f), (g, h, i) = self.columns
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def default_log_gammas(prec_bits: int = 256) -> tuple:
    return tuple(real_const(k, prec_bits) for k in ("log2", "logphi", "logsqrt5"))


def _nearest_scaled(C: int, x: PrecReal, cap: int) -> int:
    need = C.bit_length() + 64
    while True:
        try:
            return (C * x).nearest_int()
        except InsufficientPrecision:
            if not x.has_source:
                raise
            p = max(need, 2 * x.prec_bits)
            if p > cap:
                raise PrecisionCapExceeded("nearest integer undecided at the precision cap")
            x = x.recompute(p)
            need = p


def build_lattice(C: int, log_gammas, cap: int = PREC_CAP) -> LatticeBasis3:
    """Columns (1, 0, [C l1]), (0, 1, [C l2]), (0, 0, [C l3])."""
    if C < 1:
        raise UsageError("C must be a positive integer")
    r = [_nearest_scaled(C, g, cap) for g in log_gammas]
    if r[2] == 0:
        raise UsageError("singular lattice: [C log gamma3] = 0")
    return LatticeBasis3(((1, 0, r[0]), (0, 1, r[1]), (0, 0, r[2])))


def gram_schmidt(columns) -> tuple:
    """(B*, mu) over the rationals."""
    bs, mu = [], [[Fraction(0)] * 3 for _ in range(3)]
    norms = []
    for i, b in enumerate(columns):
        v = [Fraction(x) for x in b]
        for k in range(i):
            mu[i][k] = _dot(b, bs[k]) / norms[k]
            v = [v[t] - mu[i][k] * bs[k][t] for t in range(3)]
        bs.append(v)
        norms.append(_dot(v, v))
    return bs, mu


def lll_reduce(basis: LatticeBasis3, delta: Fraction = DELTA) -> LatticeBasis3:
    """Textbook LLL on exact integers; records the unimodular transform."""
    b = [list(c) for c in basis.columns]
    u = [[int(i == j) for j in range(3)] for i in range(3)]  # row i: coefficients of b[i]
    if basis.determinant() == 0:
        raise UsageError("singular basis")
    k = 1
    while k < 3:
        for j in range(k - 1, -1, -1):
            _, mu = gram_schmidt(b)
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                u[k] = [x - q * y for x, y in zip(u[k], u[j])]
        bs, mu = gram_schmidt(b)
        if _dot(bs[k], bs[k]) >= (delta - mu[k][k - 1] ** 2) * _dot(bs[k - 1], bs[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            u[k], u[k - 1] = u[k - 1], u[k]
            k = max(k - 1, 1)
    return LatticeBasis3(tuple(tuple(c) for c in b), tuple(tuple(r) for r in u))


def is_lll_reduced(basis: LatticeBasis3, delta: Fraction = DELTA) -> bool:
    bs, mu = gram_schmidt(basis.columns)
    for i in range(3):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, 3):
        if _dot(bs[k], bs[k]) < (delta - mu[k][k - 1] ** 2) * _dot(bs[k - 1], bs[k - 1]):
            return False
    return True


def _sqrt_floor(x: Fraction, bits: int = 256) -> Fraction:
    """A rational lower bound for sqrt(x), x >= 0, accurate to about 2^-bits relative."""
    shift = max(0, bits - (x.numerator.bit_length() - x.denominator.bit_length()) // 2)
    scaled = (x.numerator << (2 * shift)) // x.denominator
    return Fraction(math.isqrt(scaled), 1 << shift)


@dataclass(frozen=True)
class LLLBoundResult:
    C: int
    M: Fraction
    S: Fraction
    T: Fraction
    c_min_sq: Fraction
    lambda_lower: Fraction
    reduced: LatticeBasis3

    @property
    def c_min(self) -> Fraction:
        return _sqrt_floor(self.c_min_sq)


def lll_lower_bound(C: int, M, log_gammas=None, cap: int = PREC_CAP) -> LLLBoundResult:
    """|Lambda| > (sqrt(c^2 - S) - T) / C for all 0 < max|x_i| <= M.

    Raises GateFailed when c^2 <= T^2 + S.
    """
    M = Fraction(M)
    if C <= M ** 3:
        raise UsageError("C must exceed M^3")
    if log_gammas is None:
        log_gammas = default_log_gammas(C.bit_length() + 64)
    basis = build_lattice(C, log_gammas, cap)
    red = lll_reduce(basis)
    bs, _ = gram_schmidt(red.columns)
    c2 = min(_dot(v, v) for v in bs)
    S = 2 * M * M
    T = (1 + 3 * M) / 2
    if not c2 > T * T + S:
        raise GateFailed(f"c^2 <= T^2 + S at C = {C}: increase C")
    lam = (_sqrt_floor(c2 - S) - T) / C
    return LLLBoundResult(C, M, S, T, c2, lam, red)


def m_of(n_max) -> Fraction:
    return M_COEFF * Fraction(n_max) ** 3


def largest_n_below(lam: Fraction, start: int = 5) -> int:
    """Largest n >= start with lam < 3.66e16 0.82^n n (decreasing in n from 5 on)."""

    def holds(n):
        return lam < BOUND_COEFF * BOUND_BASE ** n * n

    if not holds(start):
        return start - 1
    lo, step = start, 1
    while holds(lo + step):
        lo, step = lo + step, step * 2
    hi = lo + step
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class LLLRound:
    n_max: int
    M: Fraction
    exponent: int
    result: LLLBoundResult
    n_bound: int


def lll_round(n_max: int, cap: int = PREC_CAP) -> LLLRound:
    """One reduction round: smallest C = 10^e > M^3 passing the gate."""
    if n_max <= TARGET_N:
        raise UsageError(f"n_max must exceed {TARGET_N}")
    M = m_of(n_max)
    m3 = M ** 3
    e0 = len(str(math.floor(m3)))  # 10^e0 > M^3
    for e in range(e0, e0 + C_SEARCH_SPAN + 1):
        C = 10 ** e
        if C <= m3:
            continue
        try:
            res = lll_lower_bound(C, M, cap=cap)
        except GateFailed:
            continue
        return LLLRound(n_max, M, e, res, largest_n_below(res.lambda_lower))
    raise GateFailed(f"no C = 10^e with e <= {e0 + C_SEARCH_SPAN} passes the gate")


def reduce_n_bound(n_max: int) -> int:
    return lll_round(n_max).n_bound


def final_bound_chain(n_start: int | None = None, max_rounds: int = 10) -> list:
    """Rounds of LLL reduction starting at the crossover bound, until n < 1000 or stuck."""
    n = n_start if n_start is not None else absolute_bound_n()[1]
    rounds = []
    while n > TARGET_N and len(rounds) < max_rounds:
        r = lll_round(n)
        rounds.append(r)
        if r.n_bound >= n:
            break
        n = r.n_bound
    return rounds
