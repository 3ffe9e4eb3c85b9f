"""Certified real arithmetic (midpoint-radius balls) and continued fractions.

Values are stored as raw mpmath ``mpf`` tuples so that every rounding can be
done at an explicit precision with an explicit rounding mode; nothing here
touches the global ``mpmath.mp`` context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import mpmath
from mpmath import libmp

from .errors import InsufficientPrecision, PrecisionCapExceeded, UsageError

DEFAULT_PREC = 192
PREC_CAP = 2**20

# radii are tracked with a short mantissa, always rounded away from zero
_ERR_PREC = 64
_UP = libmp.round_up
_DOWN = libmp.round_down
_NEAR = libmp.round_nearest
_ZERO = libmp.fzero
_ONE = libmp.fone

# allowance (in units of 2^-prec relative) for mpmath's log/exp/sqrt results
_TRANSCENDENTAL_ULPS = 3

# guard bits used when materialising named constants
_CONST_GUARD = 8

Number = Union[int, Fraction, float]


def _mk(t) -> mpmath.mpf:
    return mpmath.mp.make_mpf(t)


def _to_fraction(t) -> Fraction:
    sign, man, exp, _ = t
    if not man:
        if t == _ZERO:
            return Fraction(0)
        raise ValueError("non-finite value in ball arithmetic")
    m = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(m << exp)
    return Fraction(m, 1 << -exp)


def mpf_to_fraction(x) -> Fraction:
    """Exact value of a finite mpf."""
    return _to_fraction(x._mpf_)


def _from_fraction(q: Fraction, prec: int, rnd=_NEAR):
    """Round a rational to ``prec`` bits; exact when the denominator is 2^k."""
    num, den = q.numerator, q.denominator
    if den & (den - 1) == 0:
        return libmp.from_man_exp(num, -(den.bit_length() - 1))
    return libmp.from_rational(num, den, prec, rnd)


def _eup(t):
    """Non-negative upper bound of |t| with a short mantissa."""
    return libmp.mpf_pos(libmp.mpf_abs(t), _ERR_PREC, _UP)


def _edown(t):
    """Non-negative lower bound of |t| with a short mantissa."""
    return libmp.mpf_pos(libmp.mpf_abs(t), _ERR_PREC, _DOWN)


def _eadd(*terms):
    acc = _ZERO
    for t in terms:
        acc = libmp.mpf_add(acc, t, _ERR_PREC, _UP)
    return acc


def _emul(a, b):
    return libmp.mpf_mul(a, b, _ERR_PREC, _UP)


def _ediv(a, b):
    return libmp.mpf_div(a, b, _ERR_PREC, _UP)


def _ulp(v, prec: int, ulps: int = 1):
    if v == _ZERO:
        return _ZERO
    return libmp.mpf_shift(_eup(v), ulps - prec)


def _round(exact, prec: int):
    """Round an exactly computed tuple to ``prec`` bits, returning (value, error)."""
    if exact[3] <= prec:
        return exact, _ZERO
    v = libmp.mpf_pos(exact, prec, _NEAR)
    return v, _ulp(v, prec)


class PrecReal:
    """A real number known to lie in ``[value - err, value + err]``.

    ``prec_bits`` is the working precision used to round midpoints. A ball may
    carry a recompute function (``source``) so that it can be re-evaluated at a
    higher precision; arithmetic propagates sources when all operands have one.
    """

    __slots__ = ("_v", "_e", "prec_bits", "_source")

    def __init__(self, value, err=0, prec_bits: int = DEFAULT_PREC, source=None):
        self._v = _coerce_raw(value, prec_bits)
        self._e = _err_raw(err) if err else _ZERO
        self.prec_bits = int(prec_bits)
        self._source = source

    @classmethod
    def _raw(cls, v, e, prec_bits, source=None) -> "PrecReal":
        obj = cls.__new__(cls)
        obj._v = v
        obj._e = e
        obj.prec_bits = prec_bits
        obj._source = source
        return obj

    @classmethod
    def exact(cls, x: Number, prec_bits: int = DEFAULT_PREC) -> "PrecReal":
        """Ball around an int, float or Fraction; rounding error is accounted for."""
        if isinstance(x, PrecReal):
            return x
        q = Fraction(x)
        v = _from_fraction(q, prec_bits + _CONST_GUARD)
        e = _ZERO if _to_fraction(v) == q else _ulp(v, prec_bits + _CONST_GUARD)
        return cls._raw(v, e, prec_bits, lambda p, q=q: cls.exact(q, p))

    @classmethod
    def from_interval(cls, lo: Fraction, hi: Fraction, prec_bits: int, source=None) -> "PrecReal":
        """Smallest ball containing the dyadic interval [lo, hi]."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise UsageError("empty interval")
        mid = (lo + hi) / 2
        rad = (hi - lo) / 2
        v = _from_fraction(mid, prec_bits + 64)
        slack = abs(_to_fraction(v) - mid)
        e = _eup(_from_fraction(rad + slack, _ERR_PREC, libmp.round_ceiling))
        return cls._raw(v, e, prec_bits, source)

    # -- accessors ---------------------------------------------------------

    @property
    def value(self) -> mpmath.mpf:
        return _mk(self._v)

    @property
    def err(self) -> mpmath.mpf:
        return _mk(self._e)

    @property
    def has_source(self) -> bool:
        return self._source is not None

    def lower(self) -> Fraction:
        return _to_fraction(self._v) - _to_fraction(self._e)

    def upper(self) -> Fraction:
        return _to_fraction(self._v) + _to_fraction(self._e)

    def lower_mpf(self) -> mpmath.mpf:
        return _mk(libmp.mpf_sub(self._v, self._e, self.prec_bits + 8, libmp.round_floor))

    def upper_mpf(self) -> mpmath.mpf:
        return _mk(libmp.mpf_add(self._v, self._e, self.prec_bits + 8, libmp.round_ceiling))

    def contains(self, x) -> bool:
        if isinstance(x, PrecReal):
            return self.lower() <= x.lower() and x.upper() <= self.upper()
        q = x if isinstance(x, Fraction) else Fraction(x)
        return self.lower() <= q <= self.upper()

    def overlaps(self, other: "PrecReal") -> bool:
        return self.lower() <= other.upper() and other.lower() <= self.upper()

    def recompute(self, prec_bits: int) -> "PrecReal":
        if self._source is None:
            raise UsageError("value has no recompute source")
        return self._source(prec_bits)

    def with_source(self, source) -> "PrecReal":
        return PrecReal._raw(self._v, self._e, self.prec_bits, source)

    def __repr__(self):
        mid = libmp.to_str(self._v, 20)
        rad = libmp.to_str(self._e, 3) if self._e != _ZERO else "0"
        return f"PrecReal({mid} +/- {rad}, prec={self.prec_bits})"

    def __float__(self):
        return libmp.to_float(self._v)

    def nstr(self, digits: int = 15) -> str:
        return libmp.to_str(self._v, digits)

    # -- certified decisions -----------------------------------------------

    def sign(self) -> int:
        """Certified sign; raises InsufficientPrecision if the ball straddles 0."""
        if self._e == _ZERO:
            return libmp.mpf_sign(self._v)
        if libmp.mpf_gt(libmp.mpf_abs(self._v), self._e):
            return libmp.mpf_sign(self._v)
        raise InsufficientPrecision("sign undecided", extra_bits=self.prec_bits)

    def is_positive(self) -> bool:
        return self.sign() > 0

    def _cmp(self, other) -> int:
        other = _coerce(other, self.prec_bits)
        d = libmp.mpf_sub(self._v, other._v)
        e = libmp.mpf_add(self._e, other._e)
        if libmp.mpf_gt(d, e):
            return 1
        if libmp.mpf_lt(d, libmp.mpf_neg(e)):
            return -1
        if d == _ZERO and e == _ZERO:
            return 0
        raise InsufficientPrecision("comparison undecided", extra_bits=self.prec_bits)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def floor(self) -> int:
        lo, hi = self.lower(), self.upper()
        a, b = math.floor(lo), math.floor(hi)
        if a != b:
            raise InsufficientPrecision("floor undecided", extra_bits=self.prec_bits)
        return a

    def nearest_int(self) -> int:
        """Nearest integer (ties away from zero), certified over the whole ball."""
        lo, hi = self.lower(), self.upper()
        a, b = _round_half_away(lo), _round_half_away(hi)
        if a != b:
            raise InsufficientPrecision("nearest integer undecided", extra_bits=self.prec_bits)
        return a

    def dist_to_int(self) -> "PrecReal":
        """Distance to the nearest integer; 1-Lipschitz, so the radius carries over."""
        k = libmp.to_int(self._v, _NEAR)
        d = libmp.mpf_abs(libmp.mpf_sub(self._v, libmp.from_int(k)))
        v, r = _round(d, self.prec_bits)
        src = None
        if self._source is not None:
            src = lambda p, s=self._source: s(p).dist_to_int()
        return PrecReal._raw(v, _eadd(self._e, r), self.prec_bits, src)

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self):
        src = None if self._source is None else (lambda p, s=self._source: -s(p))
        return PrecReal._raw(libmp.mpf_neg(self._v), self._e, self.prec_bits, src)

    def __abs__(self):
        src = None if self._source is None else (lambda p, s=self._source: abs(s(p)))
        return PrecReal._raw(libmp.mpf_abs(self._v), self._e, self.prec_bits, src)

    def __add__(self, other):
        other = _coerce(other, self.prec_bits)
        p = min(self.prec_bits, other.prec_bits)
        v, r = _round(libmp.mpf_add(self._v, other._v), p)
        return PrecReal._raw(v, _eadd(self._e, other._e, r), p,
                             _combine(self, other, lambda a, b: a + b))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other, self.prec_bits)
        p = min(self.prec_bits, other.prec_bits)
        v, r = _round(libmp.mpf_sub(self._v, other._v), p)
        return PrecReal._raw(v, _eadd(self._e, other._e, r), p,
                             _combine(self, other, lambda a, b: a - b))

    def __rsub__(self, other):
        return _coerce(other, self.prec_bits) - self

    def __mul__(self, other):
        other = _coerce(other, self.prec_bits)
        p = min(self.prec_bits, other.prec_bits)
        v, r = _round(libmp.mpf_mul(self._v, other._v), p)
        e = _eadd(_emul(_eup(self._v), other._e), _emul(_eup(other._v), self._e),
                  _emul(self._e, other._e), r)
        return PrecReal._raw(v, e, p, _combine(self, other, lambda a, b: a * b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other, self.prec_bits)
        p = min(self.prec_bits, other.prec_bits)
        blo = libmp.mpf_sub(libmp.mpf_abs(other._v), other._e)
        if libmp.mpf_sign(blo) <= 0:
            raise InsufficientPrecision("divisor ball contains zero", extra_bits=p)
        v = libmp.mpf_div(self._v, other._v, p, _NEAR)
        num = _eadd(self._e, _emul(_eadd(_eup(v), _ulp(v, p)), other._e))
        e = _eadd(_ediv(num, _edown(blo)), _ulp(v, p))
        return PrecReal._raw(v, e, p, _combine(self, other, lambda a, b: a / b))

    def __rtruediv__(self, other):
        return _coerce(other, self.prec_bits) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise UsageError("only non-negative integer powers are supported")
        result = PrecReal.exact(1, self.prec_bits)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def log(self) -> "PrecReal":
        p = self.prec_bits
        lo = libmp.mpf_sub(self._v, self._e)
        if libmp.mpf_sign(lo) <= 0:
            if libmp.mpf_sign(libmp.mpf_add(self._v, self._e)) <= 0:
                raise UsageError("log of a non-positive number")
            raise InsufficientPrecision("log argument not certified positive", extra_bits=p)
        v = libmp.mpf_log(self._v, p, _NEAR)
        e = _eadd(_ediv(self._e, _edown(lo)), _ulp(v, p, _TRANSCENDENTAL_ULPS))
        src = None if self._source is None else (lambda q, s=self._source: s(q).log())
        return PrecReal._raw(v, e, p, src)

    def exp(self) -> "PrecReal":
        p = self.prec_bits
        v = libmp.mpf_exp(self._v, p, _NEAR)
        vu = _eadd(_eup(v), _ulp(v, p, _TRANSCENDENTAL_ULPS))
        grow = libmp.mpf_sub(libmp.mpf_exp(self._e, _ERR_PREC, _UP), _ONE, _ERR_PREC, _UP)
        e = _eadd(_emul(vu, grow), _ulp(v, p, _TRANSCENDENTAL_ULPS))
        src = None if self._source is None else (lambda q, s=self._source: s(q).exp())
        return PrecReal._raw(v, e, p, src)

    def sqrt(self) -> "PrecReal":
        p = self.prec_bits
        lo = libmp.mpf_sub(self._v, self._e)
        if libmp.mpf_sign(libmp.mpf_add(self._v, self._e)) < 0:
            raise UsageError("sqrt of a negative number")
        v = libmp.mpf_sqrt(libmp.mpf_abs(self._v), p, _NEAR)
        if libmp.mpf_sign(lo) > 0:
            prop = _ediv(self._e, libmp.mpf_sqrt(_edown(lo), _ERR_PREC, _DOWN))
        else:
            hi = libmp.mpf_add(self._v, self._e)
            prop = libmp.mpf_sqrt(_eup(hi), _ERR_PREC, _UP)
        e = _eadd(prop, _ulp(v, p, _TRANSCENDENTAL_ULPS))
        src = None if self._source is None else (lambda q, s=self._source: s(q).sqrt())
        return PrecReal._raw(v, e, p, src)

    def cbrt(self) -> "PrecReal":
        if self.sign() <= 0:
            raise UsageError("cbrt is only provided for positive balls")
        return (self.log() / 3).exp()


def _round_half_away(q: Fraction) -> int:
    if q >= 0:
        return math.floor(q + Fraction(1, 2))
    return -math.floor(-q + Fraction(1, 2))


def _coerce_raw(x, prec: int):
    if isinstance(x, tuple):
        return x
    if isinstance(x, mpmath.mpf):
        return x._mpf_
    if isinstance(x, int):
        return libmp.from_int(x)
    if isinstance(x, float):
        return libmp.from_float(x)
    if isinstance(x, Fraction):
        return _from_fraction(x, prec)
    if isinstance(x, str):
        return libmp.from_str(x, prec, _NEAR)
    raise TypeError(f"cannot convert {type(x).__name__} to a ball")


def _err_raw(err):
    if isinstance(err, Fraction):
        return _eup(_from_fraction(abs(err), _ERR_PREC, libmp.round_ceiling))
    if isinstance(err, str):
        return _eup(libmp.from_str(err, _ERR_PREC, libmp.round_ceiling))
    return _eup(_coerce_raw(err, _ERR_PREC))


def _coerce(x, prec: int) -> PrecReal:
    if isinstance(x, PrecReal):
        return x
    if isinstance(x, (int, float, Fraction)):
        return PrecReal.exact(x, prec)
    raise TypeError(f"unsupported operand type {type(x).__name__}")


def _combine(a: PrecReal, b: PrecReal, op: Callable):
    if a._source is None or b._source is None:
        return None
    sa, sb = a._source, b._source
    return lambda p: op(sa(p), sb(p))


# -- named constants ---------------------------------------------------------

def _const_raw(name: str, prec: int):
    if name == "phi":
        return libmp.mpf_phi(prec, _NEAR)
    if name == "psi":
        return libmp.mpf_sub(_ONE, libmp.mpf_phi(prec + 4, _NEAR), prec, _NEAR)
    if name == "sqrt5":
        return libmp.mpf_sqrt(libmp.from_int(5), prec, _NEAR)
    if name == "log2":
        return libmp.mpf_ln2(prec, _NEAR)
    if name == "logphi":
        return libmp.mpf_log(libmp.mpf_phi(prec + 8, _NEAR), prec, _NEAR)
    if name == "logsqrt5":
        return libmp.mpf_shift(libmp.mpf_log(libmp.from_int(5), prec + 2, _NEAR), -1)
    if name == "e":
        return libmp.mpf_e(prec, _NEAR)
    raise UsageError(f"unknown constant {name!r}")


CONSTANT_NAMES = ("phi", "psi", "sqrt5", "log2", "logphi", "logsqrt5", "e")


def real_const(name: str, prec_bits: int = DEFAULT_PREC) -> PrecReal:
    """One of ``CONSTANT_NAMES`` with radius at most 2^(2 - prec_bits)."""
    if prec_bits < 16:
        raise UsageError("prec_bits must be at least 16")
    work = prec_bits + _CONST_GUARD
    v = _const_raw(name, work)
    e = _ulp(v, work, _TRANSCENDENTAL_ULPS + 1)
    return PrecReal._raw(v, e, prec_bits, lambda p, name=name: real_const(name, p))


# -- precision management ----------------------------------------------------

def with_precision(fn: Callable[[int], object], prec_bits: int = DEFAULT_PREC,
                   cap: int = PREC_CAP):
    """Call ``fn(prec)``, doubling ``prec`` on InsufficientPrecision up to ``cap``."""
    p = prec_bits
    while True:
        try:
            return fn(p)
        except InsufficientPrecision as exc:
            if p >= cap:
                raise PrecisionCapExceeded(f"precision cap {cap} bits reached: {exc}") from exc
            bump = 2 * p
            if exc.extra_bits:
                bump = max(bump, p + int(exc.extra_bits))
            p = min(bump, cap)


def refine(x: PrecReal, target_err, cap: int = PREC_CAP) -> PrecReal:
    """Recompute ``x`` at increasing precision until its radius is at most ``target_err``."""
    target = Fraction(target_err) if not isinstance(target_err, mpmath.mpf) \
        else _to_fraction(target_err._mpf_)
    if _to_fraction(x._e) <= target:
        return x
    if x._source is None:
        raise UsageError("refine needs a value with a recompute source")
    p = max(x.prec_bits, 16)
    while True:
        p *= 2
        if p > cap:
            raise PrecisionCapExceeded(f"cannot reach radius {float(target):.3g} below {cap} bits")
        y = x.recompute(p)
        if _to_fraction(y._e) <= target:
            return y


# -- continued fractions -----------------------------------------------------

@dataclass(frozen=True)
class ContinuedFraction:
    partial_quotients: tuple
    convergents: tuple
    truncation: str  # "exact", "max_terms" or "precision"

    def __len__(self):
        return len(self.partial_quotients)


def convergents_of(partial_quotients) -> list:
    p0, q0, p1, q1 = 0, 1, 1, 0
    out = []
    for a in partial_quotients:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


def _interval_cf(lo: Fraction, hi: Fraction, max_terms: int):
    an, ad = lo.numerator, lo.denominator
    bn, bd = hi.numerator, hi.denominator
    terms = []
    while len(terms) < max_terms:
        qa, ra = divmod(an, ad)
        qb, rb = divmod(bn, bd)
        if qa != qb:
            return terms, "precision"
        terms.append(qa)
        if ra == 0 and rb == 0:
            return terms, "exact"
        if ra == 0 or rb == 0:
            return terms, "precision"
        # 1/(x - q) reverses the order of the endpoints
        an, ad, bn, bd = bd, rb, ad, ra
    return terms, "max_terms"


def cf_expand(x, max_terms: int = 10_000) -> ContinuedFraction:
    """Certified partial quotients of ``x`` (a PrecReal or an exact rational).

    A partial quotient is emitted only when every point of the ball agrees on
    it. Raises InsufficientPrecision if not even the first one is certified.
    """
    if isinstance(x, PrecReal):
        lo, hi = x.lower(), x.upper()
    else:
        lo = hi = Fraction(x)
    terms, why = _interval_cf(lo, hi, max_terms)
    if not terms:
        width = hi - lo
        extra = max(16, 2 * (width.numerator.bit_length() - width.denominator.bit_length() + 8))
        raise InsufficientPrecision("no certified partial quotient", extra_bits=extra)
    return ContinuedFraction(tuple(terms), tuple(convergents_of(terms)), why)
