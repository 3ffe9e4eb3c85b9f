"""Exact solution checking and a bounded brute-force search.

Solutions come in orbits {(x, y, r), (-x, -y, -r)}. Records always store the
orbit representative with y > 0, or y = 0 and x > 0.

Candidate pruning in ``brute_search``: write the form as a product over the
roots rho of f_n, F(x, y) = prod (x - rho*y). If an integer x is at distance
>= 1 from y*Re(rho) for every root, each factor has modulus >= 1 and at least
one is > 1 (f_n is irreducible), so |F| > 1. Hence only integers within 1 of
some y*Re(rho) need to be tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import UsageError
from .family import FamilyInstance, isolate_roots, make_instance
from .numerics import with_precision

TRIVIAL = "trivial"
NONTRIVIAL = "nontrivial"


@dataclass(frozen=True)
class SolutionRecord:
    n: int
    x: int
    y: int
    rhs: int
    triviality: str
    type_j: int

    @property
    def is_trivial(self) -> bool:
        return self.triviality == TRIVIAL

    def to_dict(self) -> dict:
        return {"n": self.n, "x": str(self.x), "y": str(self.y), "rhs": self.rhs,
                "triviality": self.triviality, "type_j": self.type_j}

    @classmethod
    def from_dict(cls, d: dict) -> "SolutionRecord":
        return cls(int(d["n"]), int(d["x"]), int(d["y"]), int(d["rhs"]),
                   d["triviality"], int(d["type_j"]))


def canonical(x: int, y: int, rhs: int) -> tuple:
    if y < 0 or (y == 0 and x < 0):
        return -x, -y, -rhs
    return x, y, rhs


def trivial_solutions(inst: FamilyInstance) -> frozenset:
    """Canonical representatives of (+-1, 0), (0, -+1), -+(F_n, 1), -+(2^n, 1)."""
    return frozenset({(1, 0, 1), (0, 1, -1), (inst.G2, 1, -1), (inst.G3, 1, -1)})


# -- solution type ---------------------------------------------------------

@lru_cache(maxsize=8)
def _complex_roots(n: int, dps: int = 60) -> tuple:
    # n = 1, 2: one real root; uncertified, used only for type labels and pruning
    inst = make_instance(n)
    ctx = mpmath.MPContext()
    ctx.dps = dps
    rts = ctx.polyroots([1, -(inst.G2 + inst.G3), inst.G2 * inst.G3, -1], maxsteps=200, extraprec=200)
    return tuple(sorted((complex(r) for r in rts), key=lambda z: (z.real, z.imag)))


def solution_type(inst: FamilyInstance, x: int, y: int) -> int:
    """Index i minimising |x - alpha^(i) y|, smallest index on ties."""
    if y == 0:
        return 1
    if inst.n < 3:
        d = [abs(x - r * y) for r in _complex_roots(inst.n)]
        return d.index(min(d)) + 1

    start = max(64, abs(x).bit_length() + abs(y).bit_length() + 32)

    def attempt(p):
        betas = [abs(x - a * y) for a in isolate_roots(inst, p).alphas]
        best = 0
        for i in (1, 2):
            if betas[i] < betas[best]:
                best = i
        return best + 1

    return with_precision(attempt, start)


def check_solution(n: int, x: int, y: int):
    """SolutionRecord for (x, y) if the form equals +-1 there, else None."""
    inst = make_instance(n)
    v = inst.form(x, y)
    if v not in (1, -1):
        return None
    cx, cy, r = canonical(x, y, v)
    kind = TRIVIAL if (cx, cy, r) in trivial_solutions(inst) else NONTRIVIAL
    return SolutionRecord(n, cx, cy, r, kind, solution_type(inst, cx, cy))


# -- brute force -------------------------------------------------------------

def _root_windows(inst: FamilyInstance) -> list:
    """(lo, hi) rationals enclosing Re(rho) for each root rho of f_n."""
    if inst.n >= 3:
        roots = isolate_roots(inst, 64)
        return [roots.interval(i) for i in (1, 2, 3)]
    slack = Fraction(1, 10**9)  # far above double rounding for roots of size < 8
    return [(Fraction(z.real) - slack, Fraction(z.real) + slack) for z in _complex_roots(inst.n)]


def brute_search(n: int, y_max: int) -> list:
    """All orbits of solutions with |y| <= y_max, as canonical records.

    Exhaustive within the radius (see the module docstring for the pruning);
    for n = 1, 2 the root windows are floating-point and not certified.
    """
    if y_max < 1:
        raise UsageError("y_max must be at least 1")
    inst = make_instance(n)
    windows = _root_windows(inst)
    found = {}
    hits = [(1, 0, 1)]  # y = 0: x^3 = +-1
    for y in range(1, y_max + 1):
        cands = set()
        for lo, hi in windows:
            a = math.floor(lo * y) - 1
            b = math.ceil(hi * y) + 1
            cands.update(range(a, b + 1))
        for x in cands:
            v = inst.form(x, y)
            if v == 1 or v == -1:
                hits.append((x, y, v))
    for x, y, _ in hits:
        rec = check_solution(n, x, y)
        found[(rec.x, rec.y, rec.rhs)] = rec
    return sorted(found.values(), key=lambda r: (r.y, r.x))


def verify_y_small(n: int) -> bool:
    """Exhaustively confirm that |y| <= 1 gives only the trivial solutions.

    y = 0 forces x^3 = +-1. For y = 1 the equation reads x(x - F)(x - 2^n) in
    {0, 2}; zero gives x in {0, F, 2^n}, and a product 2 forces every factor
    into {+-1, +-2}, impossible once 2^n - 0 >= 8 separates two of them.
    The case y = -1 is the sign image of y = 1.
    """
    if n < 3:
        raise UsageError("verify_y_small needs n >= 3")
    inst = make_instance(n)
    F, H = inst.G2, inst.G3
    sols = {(1, 0, 1)}
    for x in (0, F, H):
        sols.add(canonical(x, 1, inst.form(x, 1)))
    # a product equal to 2 needs x | 2; test those exactly rather than trust the gap
    for x in (-2, -1, 1, 2):
        if x * (x - F) * (x - H) == 2:
            sols.add(canonical(x, 1, 1))
    return sols == set(trivial_solutions(inst))
