"""Acceptance gate: one verdict line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the verdicts are repeated in
the "acceptance criteria" section of the terminal summary. Set
THUEFAM_FULL_SWEEP=1 to replace the sweep subsample by the whole 29..1000 range.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import mpmath

from conftest import FULL_SWEEP
from thuefam.bounds import PUBLISHED_C1, PUBLISHED_C2, absolute_bound_n, constant_C1, constant_C2, resolve_log_bound
from thuefam.family import make_instance, unit_log_system, isolate_roots, verify_lemmas
from thuefam.lattice import LatticeBasis3, final_bound_chain, lll_lower_bound, lll_reduce
from thuefam.numerics import PrecReal
from thuefam.reduction import reduce_case, sweep
from thuefam.search import brute_search, trivial_solutions

SAMPLE = (29, 50, 100, 500, 1000)
CI_SUBSAMPLE = tuple(range(29, 41)) + (100, 500, 999, 1000)


def test_criterion_1_root_envelopes(acceptance):
    t0 = time.perf_counter()
    results = {n: verify_lemmas(n).root_checks for n in SAMPLE}
    secs = time.perf_counter() - t0
    ok = all(all(r) and len(r) == 3 for r in results.values())
    acceptance(1, ok, f"|alpha^(i) - G_i| < 0.5^n for n in {SAMPLE}, i = 1..3 ({secs:.2f}s)")
    assert ok


def test_criterion_2_unit_logs_and_regulator(acceptance):
    ok, notes = True, []
    for n in SAMPLE:
        rep = verify_lemmas(n)
        ok &= rep.passed
        R = rep.system.regulator
        literal = Fraction(6, 5) * n + 10 * n * Fraction(81, 100) ** n - abs(R - Fraction(115, 100) * n * n).upper()
        notes.append(f"n={n}: R={R.nstr(8)}, window margin {rep.checks[-1].margin:.3g}, "
                     f"literal 1.15-centre margin {float(literal):.3g} (informational)")
    acceptance(2, ok, "all 9 l_i^(k) windows, n^2 < R < 2n^2, |R - c n^2| <= 1.2n + 10n 0.81^n "
                      "with c = 2 log(phi) log 2 + log^2 2 = 1.1476...; " + "; ".join(notes))
    assert ok


def test_criterion_3_matveev_constants(acceptance):
    c1, c2 = constant_C1(), constant_C2()
    r1, r2 = c1.upper() / PUBLISHED_C1, c2.upper() / PUBLISHED_C2
    ok = Fraction(99, 100) <= r1 < 1 and Fraction(99, 100) <= r2 < 1
    acceptance(3, ok, f"C1 = {c1.nstr(6)} ({float(1 - r1):.3%} below 2.74e16), "
                      f"C2 = {c2.nstr(6)} ({float(1 - r2):.3%} below 1.13e12)")
    assert ok


def test_criterion_4_bd_golden_values(acceptance):
    golden = {(29, 1): 4.18, (29, 2): 4.74, (29, 3): 5670,
             (1000, 1): 1.47e7, (1000, 2): 1.30e7, (1000, 3): 3.28e99}
    got = {k: reduce_case(*k).Y for k in golden}
    ok = True
    for (n, j), want in golden.items():
        tol = 10 if n == 29 else 100
        ok &= want / tol <= got[n, j] <= want * tol
    for n in (29, 1000):
        ok &= got[n, 3] > max(got[n, 1], got[n, 2])
    detail = ", ".join(f"Y({n},{j}) = {mpmath.nstr(y, 4)}" for (n, j), y in got.items())
    acceptance(4, ok, detail + "; Y(j=3) > Y(j=1,2) at both n")
    assert ok


def test_criterion_5_sweep(acceptance):
    t0 = time.perf_counter()
    if FULL_SWEEP:
        reports = [sweep(29, 1000)]
        label, limit = "full sweep 29..1000", 2 * 3600
    else:
        reports = [sweep(n, n) for n in CI_SUBSAMPLE]
        label, limit = f"subsample {CI_SUBSAMPLE[0]}..{CI_SUBSAMPLE[11]}, 100, 500, 999, 1000", 300
    secs = time.perf_counter() - t0
    cases = sum(len(r.cases) for r in reports)
    failures = sum(len(r.failures) for r in reports)
    nontrivial = sum(1 for r in reports for s in r.solutions if not s.is_trivial)
    expected = 3 * (972 if FULL_SWEEP else len(CI_SUBSAMPLE))
    ok = cases == expected and failures == 0 and nontrivial == 0 and secs <= limit
    acceptance(5, ok, f"{label}: {cases}/{expected} cases reduced, {failures} failures, "
                      f"{nontrivial} non-trivial solutions ({secs:.1f}s, limit {limit}s)")
    assert ok


def test_criterion_6_absolute_bound(acceptance):
    t0 = time.perf_counter()
    n_j3, n_j12 = absolute_bound_n()
    secs = time.perf_counter() - t0
    ok = n_j3 == 1001 and n_j12 <= 103 * 10**13 and abs(n_j12 / 1.03e15 - 1) <= 0.05 and secs < 1
    acceptance(6, ok, f"n_j3 = {n_j3}, n_j12 = {n_j12} ({n_j12 / 1.03e15 - 1:+.2%} vs 1.03e15), {secs:.3f}s")
    assert ok


def test_criterion_7_lll_chain(acceptance):
    t0 = time.perf_counter()
    chain = final_bound_chain()
    secs = time.perf_counter() - t0
    ok = len(chain) == 2
    if ok:
        l1, l2 = (float(r.result.lambda_lower) for r in chain)
        ok = (6.37e-128 <= l1 <= 6.37e-126 and 3.67e-57 <= l2 <= 3.67e-55
              and chain[0].n_bound <= 1800 and chain[1].n_bound < 1000 and secs < 60)
    detail = "; ".join(f"round {k}: C = 10^{r.exponent}, lambda >= {float(r.result.lambda_lower):.3g}, "
                       f"n <= {r.n_bound}" for k, r in enumerate(chain, 1))
    acceptance(7, ok, f"{detail} ({secs:.2f}s)")
    assert ok


def test_criterion_8_small_n(acceptance):
    extra = {}
    for n in range(1, 29):
        recs = brute_search(n, 10**4)
        extra[n] = {(r.x, r.y, r.rhs) for r in recs if not r.is_trivial}
        triv = {(r.x, r.y, r.rhs) for r in recs if r.is_trivial}
        assert triv == set(trivial_solutions(make_instance(n)))
    ok = (extra[1] == {(7, 3, 1)} and extra[2] == {(1, 2, -1)}
          and all(not extra[n] for n in range(3, 29)))
    acceptance(8, ok, f"bounded search |y| <= 10^4 (not exhaustive): n=1 extra {sorted(extra[1])}, "
                      f"n=2 extra {sorted(extra[2])}, n=3..28 none")
    assert ok


def _reduced(cols):
    bs, mu = [], {}
    for i, b in enumerate(cols):
        v = [Fraction(t) for t in b]
        for k in range(i):
            mu[i, k] = sum(Fraction(x) * y for x, y in zip(b, bs[k])) / sum(y * y for y in bs[k])
            v = [v[t] - mu[i, k] * bs[k][t] for t in range(3)]
        bs.append(v)
    nrm = [sum(t * t for t in v) for v in bs]
    return (all(abs(m) <= Fraction(1, 2) for m in mu.values())
            and all(nrm[k] >= (Fraction(3, 4) - mu[k, k - 1] ** 2) * nrm[k - 1] for k in (1, 2)))


def test_criterion_9_property_suites(acceptance):
    rng = random.Random(20240501)
    verdicts = {}

    ok = True
    for _ in range(300):
        a = Fraction(rng.randint(1, 10**9), rng.randint(1, 10**6))
        p = rng.choice([53, 100, 192, 300])
        lo = (PrecReal.exact(a, p).log() * 3).exp()
        hi = (PrecReal.exact(a, 2 * p).log() * 3).exp()
        ok &= lo.contains(a ** 3) and hi.contains(a ** 3) and lo.overlaps(hi) and hi.err <= lo.err
    verdicts["interval soundness under doubling (300)"] = ok

    ok = True
    for n in (3, 10, 29, 100, 500, 1000):
        inst = make_instance(n)
        system = unit_log_system(inst, isolate_roots(inst, 384), check=False)
        minors = system.minors()
        ok &= len(minors) == 36 and all(m.overlaps(system.regulator) for _, m in minors)
    verdicts["36 regulator minors agree"] = ok

    ok = True
    done = 0
    while done < 200:
        flat = [rng.randint(-10**6, 10**6) for _ in range(9)]
        cols = (tuple(flat[0:3]), tuple(flat[3:6]), tuple(flat[6:9]))
        basis = LatticeBasis3(cols)
        if basis.determinant() == 0:
            continue
        red = lll_reduce(basis)
        ok &= _reduced(red.columns) and abs(red.determinant()) == abs(basis.determinant())
        done += 1
    verdicts["LLL size-reduction and Lovasz (200)"] = ok

    res = lll_lower_bound(10**6, 10)
    ctx = mpmath.MPContext()
    ctx.dps = 40
    logs = (ctx.log(2), ctx.log((1 + ctx.sqrt(5)) / 2), ctx.log(ctx.sqrt(5)))
    best = min(abs(a * logs[0] + b * logs[1] + c * logs[2])
               for a, b, c in itertools.product(range(-10, 11), repeat=3) if (a, b, c) != (0, 0, 0))
    verdicts["toy LLL bound <= brute force"] = 0 < res.lambda_lower <= Fraction(str(best))

    ok = True
    for _ in range(1000):
        c = Fraction(rng.uniform(1, 20)).limit_denominator(10**6)
        a = Fraction(rng.uniform(2, 20)).limit_denominator(10**6)
        bound = resolve_log_bound(c, a)
        cf, af = float(c), float(a)
        best_x = max((x for x in range(1, 4 * int(bound) + 10) if x < cf * (af + math.log(x))), default=0)
        ok &= best_x < bound
    verdicts["resolve_log_bound >= brute-force fixed point (1000)"] = ok

    passed = all(verdicts.values())
    acceptance(9, passed, "; ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in verdicts.items()))
    assert passed


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
