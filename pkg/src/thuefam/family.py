"""Exact data of one family member, certified roots of f_n, unit logarithms.

Conventions: indices i, k are 1-based in names and docstrings (G_1 = 0,
G_2 = F_n, G_3 = 2^n); Python containers are 0-based, so ``l[i-1][k-1]``
holds log|alpha^(k) - G_i|.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import mpmath

from .errors import IntegrityError, InsufficientPrecision, UsageError
from .numerics import DEFAULT_PREC, PREC_CAP, PrecReal, real_const, with_precision


def fibonacci(n: int) -> int:
    """F_n by fast doubling on exact integers (F_0 = 0, F_1 = 1)."""
    if n < 0:
        raise UsageError("fibonacci index must be non-negative")
    a, b = 0, 1  # F_k, F_{k+1}
    for bit in bin(n)[2:]:
        c = a * (2 * b - a)
        d = a * a + b * b
        a, b = (d, c + d) if bit == "1" else (c, d)
    return a


@dataclass(frozen=True)
class FamilyInstance:
    n: int
    G1: int
    G2: int
    G3: int

    @property
    def G(self) -> tuple:
        return (self.G1, self.G2, self.G3)

    def f(self, x) -> Fraction:
        """f_n(x) = (x - G1)(x - G2)(x - G3) - 1, exactly."""
        x = Fraction(x)
        return (x - self.G1) * (x - self.G2) * (x - self.G3) - 1

    def form(self, x: int, y: int) -> int:
        """x(x - F_n y)(x - 2^n y) - y^3 in exact integer arithmetic."""
        return (x - self.G1 * y) * (x - self.G2 * y) * (x - self.G3 * y) - y ** 3

    def sign_at(self, m: int, s: int) -> int:
        """Sign of f_n(m / 2^s), decided on integers."""
        scale = 1 << s
        v = (m - self.G1 * scale) * (m - self.G2 * scale) * (m - self.G3 * scale) - (scale ** 3)
        return (v > 0) - (v < 0)


def make_instance(n: int) -> FamilyInstance:
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"family parameter must be a positive integer, got {n!r}")
    return FamilyInstance(n=n, G1=0, G2=fibonacci(n), G3=1 << n)


# -- root isolation --------------------------------------------------------

@dataclass(frozen=True)
class RootTriple:
    """Certified roots alpha1 < alpha2 < alpha3 of f_n.

    ``cells[i]`` is ``(m, E)``: the root lies strictly inside
    ``(m / 2^E, (m + 1) / 2^E)``, certified by exact sign evaluation.
    """

    n: int
    prec_bits: int
    cells: tuple
    alpha1: PrecReal = field(repr=False)
    alpha2: PrecReal = field(repr=False)
    alpha3: PrecReal = field(repr=False)

    @property
    def alphas(self) -> tuple:
        return (self.alpha1, self.alpha2, self.alpha3)

    def interval(self, i: int) -> tuple:
        """Exact (lo, hi) for the root alpha^(i), i in {1, 2, 3}."""
        m, e = self.cells[i - 1]
        return Fraction(m, 1 << e), Fraction(m + 1, 1 << e)


def root_scale_bits(n: int, prec_bits: int) -> int:
    # eta_i^(i) can be as small as about 2^(-2n); keep prec_bits relative bits on it
    return prec_bits + 2 * n + 8


def _asymptotic_brackets(inst: FamilyInstance):
    """Brackets (lo, hi) at scale 2^-n next to G_1, G_2, G_3, or None if a sign check fails."""
    s = inst.n
    one = 1 << s
    brackets = [
        (0, 1),
        (inst.G2 * one - 1, inst.G2 * one),
        (inst.G3 * one, inst.G3 * one + 1),
    ]
    for lo, hi in brackets:
        if inst.sign_at(lo, s) * inst.sign_at(hi, s) >= 0:
            return None
    return brackets, s


def _scan_brackets(inst: FamilyInstance):
    """Brackets from the monotone pieces of f_n between its critical points."""
    # f'(x) = 3x^2 - 2(G2 + G3)x + G2 G3; sample just inside each critical point
    s = inst.n + 4
    a, b = inst.G2, inst.G3
    disc = a * a - a * b + b * b
    r = isqrt(disc << (2 * s))
    c_minus = (((a + b) << s) - r) // 3
    c_plus = (((a + b) << s) + r) // 3
    points = [-(1 << s), c_minus, c_plus, (b + 2) << s]
    signs = [inst.sign_at(p, s) for p in points]
    if signs != [-1, 1, -1, 1]:
        raise IntegrityError(f"could not bracket three real roots of f_{inst.n}")
    return [(points[0], points[1]), (points[1], points[2]), (points[2], points[3])], s


def _newton_guess(inst: FamilyInstance, lo: int, hi: int, s: int, E: int):
    ctx = mpmath.MPContext()
    ctx.prec = E + inst.n + 48
    g2, g3 = ctx.mpf(inst.G2), ctx.mpf(inst.G3)
    x = ctx.ldexp(ctx.mpf(lo + hi), -(s + 1))
    tol = ctx.ldexp(1, -(E + 4))
    for _ in range(200):
        fx = x * (x - g2) * (x - g3) - 1
        dfx = 3 * x * x - 2 * (g2 + g3) * x + g2 * g3
        if not dfx:
            return None
        step = fx / dfx
        x -= step
        if abs(step) < tol:
            return int(ctx.floor(ctx.ldexp(x, E)))
    return None


def _refine_cell(inst: FamilyInstance, lo: int, hi: int, s: int, E: int) -> int:
    """Return m with a certified sign change of f_n across [m/2^E, (m+1)/2^E]."""
    sign_lo = inst.sign_at(lo, s)
    lo_E, hi_E = lo << (E - s), hi << (E - s)
    m = _newton_guess(inst, lo, hi, s, E)
    if m is not None and lo_E <= m < hi_E:
        if inst.sign_at(m, E) == sign_lo and inst.sign_at(m + 1, E) == -sign_lo:
            return m
    # exact bisection fallback
    a, b = lo_E, hi_E
    while b - a > 1:
        mid = (a + b) // 2
        sg = inst.sign_at(mid, E)
        if sg == 0:
            raise IntegrityError(f"f_{inst.n} has a dyadic root, it cannot be irreducible")
        if sg == sign_lo:
            a = mid
        else:
            b = mid
    return a


def isolate_roots(inst: FamilyInstance, prec_bits: int = DEFAULT_PREC) -> RootTriple:
    """Certified cells for the three real roots of f_n (n >= 3).

    Cells live on the dyadic grid of spacing 2^-E, E = prec_bits + 2n + 8, so
    refining at a higher precision always yields a sub-cell of the old one.
    """
    if inst.n < 3:
        raise UsageError("three real roots are only guaranteed for n >= 3")
    found = _asymptotic_brackets(inst)
    brackets, s = found if found is not None else _scan_brackets(inst)
    E = root_scale_bits(inst.n, prec_bits)
    cells = tuple((_refine_cell(inst, lo, hi, s, E), E) for lo, hi in brackets)
    alphas = []
    for idx, (m, e) in enumerate(cells):
        src = (lambda p, idx=idx: isolate_roots(inst, p).alphas[idx])
        alphas.append(PrecReal.from_interval(Fraction(m, 1 << e), Fraction(m + 1, 1 << e),
                                             prec_bits, source=src))
    if not (cells[0][0] + 1 <= cells[1][0] and cells[1][0] + 1 <= cells[2][0]):
        raise IntegrityError("root cells are not ordered")
    return RootTriple(inst.n, prec_bits, cells, *alphas)


def root_envelope_ok(inst: FamilyInstance, roots: RootTriple) -> list:
    """For each root, whether its certified cell lies within G_i +/- 0.5^n."""
    r = Fraction(1, 1 << inst.n)
    out = []
    for i in (1, 2, 3):
        lo, hi = roots.interval(i)
        g = inst.G[i - 1]
        out.append(g - r <= lo and hi <= g + r)
    return out


# -- unit logarithms ---------------------------------------------------------

@dataclass(frozen=True)
class EnvelopeCheck:
    name: str
    value: PrecReal = field(repr=False)
    center: PrecReal = field(repr=False)
    radius: Fraction
    passed: bool
    margin: float  # certified lower bound of radius - |value - center|


def check_window(name: str, value: PrecReal, center: PrecReal, radius) -> EnvelopeCheck:
    """Certify |value - center| <= radius, or certify its failure."""
    radius = Fraction(radius)
    dev = abs(value - center)
    if dev.upper() <= radius:
        passed = True
    elif dev.lower() > radius:
        passed = False
    else:
        raise InsufficientPrecision(f"envelope {name} undecided", extra_bits=value.prec_bits)
    margin = float(radius - dev.upper()) if passed else float(radius - dev.lower())
    return EnvelopeCheck(name, value, center, radius, passed, margin)


def check_between(name: str, value: PrecReal, lo, hi) -> EnvelopeCheck:
    """Certify lo < value < hi (strict), or certify its failure."""
    lo, hi = Fraction(lo), Fraction(hi)
    if value.lower() > lo and value.upper() < hi:
        passed = True
    elif value.upper() <= lo or value.lower() >= hi:
        passed = False
    else:
        raise InsufficientPrecision(f"bound {name} undecided", extra_bits=value.prec_bits)
    margin = float(min(value.lower() - lo, hi - value.upper()))
    center = PrecReal.exact((lo + hi) / 2, value.prec_bits)
    return EnvelopeCheck(name, value, center, (hi - lo) / 2, passed, margin)


@dataclass(frozen=True)
class UnitLogSystem:
    n: int
    l: tuple = field(repr=False)
    regulator: PrecReal = field(repr=False)
    checks: tuple = field(default=(), repr=False)

    def log(self, i: int, k: int) -> PrecReal:
        """l_i^(k) = log|alpha^(k) - G_i| with 1-based indices."""
        return self.l[i - 1][k - 1]

    def minor(self, i: int, j: int, k: int, m: int) -> PrecReal:
        return abs(self.log(i, k) * self.log(j, m) - self.log(i, m) * self.log(j, k))

    def minors(self) -> list:
        """All 36 admissible 2x2 minors as ((i, j, k, l), value)."""
        out = []
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                if i == j:
                    continue
                for k in (1, 2, 3):
                    for m in (1, 2, 3):
                        if k != m:
                            out.append(((i, j, k, m), self.minor(i, j, k, m)))
        return out


def lik_envelope(n: int, i: int, k: int, prec_bits: int):
    """(center, radius) of the window for l_i^(k), valid for n >= 29."""
    log2 = real_const("log2", prec_bits)
    logphi = real_const("logphi", prec_bits)
    logsqrt5 = real_const("logsqrt5", prec_bits)
    small = Fraction(81, 100) ** n
    if i != k and max(i, k) == 3:
        return n * log2, small
    if i != k:
        return n * logphi - logsqrt5, 2 * small
    if i in (1, 2):
        return -n * (logphi + log2) + logsqrt5, 3 * small
    return -2 * n * log2, 2 * small


def regulator_coefficient(prec_bits: int) -> PrecReal:
    """2 log(phi) log(2) + log(2)^2, the leading coefficient of R in n^2 (about 1.1476)."""
    log2 = real_const("log2", prec_bits)
    logphi = real_const("logphi", prec_bits)
    return 2 * logphi * log2 + log2 * log2


ENVELOPE_MIN_N = 29


def unit_log_system(inst: FamilyInstance, roots: RootTriple, check: bool = True) -> UnitLogSystem:
    """All nine unit logarithms and the regulator.

    For n >= 29 the log windows and n^2 < R < 2n^2 are certified, raising
    IntegrityError on a violation; set ``check=False`` to skip that.
    """
    if roots.n != inst.n:
        raise UsageError("roots belong to a different family member")
    l = tuple(
        tuple(abs(roots.alphas[k] - inst.G[i]).log() for k in range(3))
        for i in range(3)
    )
    reg = abs(l[0][0] * l[1][1] - l[0][1] * l[1][0])
    system = UnitLogSystem(inst.n, l, reg)
    checks = ()
    if check and inst.n >= ENVELOPE_MIN_N:
        checks = tuple(lemma_checks(inst, system))
        bad = [c.name for c in checks if not c.passed]
        if bad:
            raise IntegrityError(f"n={inst.n}: envelope violated: {', '.join(bad)}")
    return UnitLogSystem(inst.n, l, reg, checks)


def lemma_checks(inst: FamilyInstance, system: UnitLogSystem) -> list:
    """Certified log windows and regulator bounds (hypothesis n >= 29)."""
    n = inst.n
    p = system.regulator.prec_bits
    out = []
    for i in (1, 2, 3):
        for k in (1, 2, 3):
            center, radius = lik_envelope(n, i, k, p)
            out.append(check_window(f"l_{i}^({k})", system.log(i, k), center, radius))
    out.append(check_between("n^2 < R < 2n^2", system.regulator, n * n, 2 * n * n))
    return out


def regulator_window(inst: FamilyInstance, system: UnitLogSystem) -> EnvelopeCheck:
    """|R - (2 log phi log 2 + log^2 2) n^2| <= 1.2 n + 10 n 0.81^n."""
    n = inst.n
    p = system.regulator.prec_bits
    center = regulator_coefficient(p) * (n * n)
    radius = Fraction(6, 5) * n + 10 * n * Fraction(81, 100) ** n
    return check_window("R ~ 1.1476 n^2", system.regulator, center, radius)


def compute_unit_logs(n: int, prec_bits: int = DEFAULT_PREC, cap: int = PREC_CAP):
    """(instance, roots, system) with precision doubled until every check is decided."""
    inst = make_instance(n)

    def attempt(p):
        roots = isolate_roots(inst, p)
        system = unit_log_system(inst, roots)
        if n >= ENVELOPE_MIN_N:
            regulator_window(inst, system)
        return inst, roots, system

    return with_precision(attempt, prec_bits, cap)


@dataclass(frozen=True)
class LemmaReport:
    n: int
    prec_bits: int
    roots: RootTriple = field(repr=False)
    system: UnitLogSystem = field(repr=False)
    root_checks: tuple
    checks: tuple

    @property
    def envelopes_checked(self) -> bool:
        return self.n >= ENVELOPE_MIN_N

    @property
    def passed(self) -> bool:
        return all(self.root_checks) and all(c.passed for c in self.checks)


def verify_lemmas(n: int, prec_bits: int = DEFAULT_PREC, cap: int = PREC_CAP) -> LemmaReport:
    """Every envelope decided (pass or fail), never raising on a failure.

    Below n = 29 only roots and unit logs are computed.
    """
    inst = make_instance(n)

    def attempt(p):
        roots = isolate_roots(inst, p)
        system = unit_log_system(inst, roots, check=False)
        if n < ENVELOPE_MIN_N:
            return LemmaReport(n, p, roots, system, (), ())
        checks = tuple(lemma_checks(inst, system)) + (regulator_window(inst, system),)
        return LemmaReport(n, p, roots, system, tuple(root_envelope_ok(inst, roots)), checks)

    return with_precision(attempt, prec_bits, cap)
