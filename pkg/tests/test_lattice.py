import itertools
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from thuefam.errors import GateFailed, UsageError
from thuefam.lattice import (LatticeBasis3, build_lattice, default_log_gammas, largest_n_below,
                             lll_lower_bound, lll_reduce, lll_round, m_of, reduce_n_bound)


def _det(cols):
    (a, b, c), (d, e, f), (g, h, i) = cols
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _reduced_exactly(cols, delta=Fraction(3, 4)):
    # independent Gram-Schmidt, straight from the definitions
    bs, mu = [], {}
    for i, b in enumerate(cols):
        v = [Fraction(t) for t in b]
        for k in range(i):
            mu[i, k] = sum(Fraction(x) * y for x, y in zip(b, bs[k])) / sum(y * y for y in bs[k])
            v = [v[t] - mu[i, k] * bs[k][t] for t in range(3)]
        bs.append(v)
    norm = [sum(t * t for t in v) for v in bs]
    size_ok = all(abs(m) <= Fraction(1, 2) for m in mu.values())
    lovasz_ok = all(norm[k] >= (delta - mu[k, k - 1] ** 2) * norm[k - 1] for k in (1, 2))
    return size_ok and lovasz_ok


def test_build_lattice_examples():
    assert build_lattice(10**6, default_log_gammas()).matrix() == (
        (1, 0, 0), (0, 1, 0), (693147, 481212, 804719))
    assert build_lattice(1, default_log_gammas()).matrix()[2] == (1, 0, 1)
    row = build_lattice(10**192, default_log_gammas(64)).matrix()[2]
    assert all(192 <= len(str(abs(v))) <= 193 for v in row)


def test_build_lattice_oracle_at_huge_c():
    ctx = mpmath.MPContext()
    ctx.dps = 400
    want = [int(ctx.nint(10**192 * v)) for v in
            (ctx.log(2), ctx.log((1 + ctx.sqrt(5)) / 2), ctx.log(ctx.sqrt(5)))]
    assert list(build_lattice(10**192, default_log_gammas(64)).matrix()[2]) == want


def test_identity_is_reduced():
    ident = LatticeBasis3(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert lll_reduce(ident).columns == ident.columns


def test_skewed_example():
    basis = LatticeBasis3(((1, 0, 0), (10**6, 1, 0), (0, 0, 1)))
    red = lll_reduce(basis)
    assert _reduced_exactly(red.columns)
    assert abs(red.determinant()) == abs(basis.determinant())
    norms = [sum(t * t for t in c) for c in red.columns]
    assert max(norms[:2]) <= 10**12 + 1


matrices = st.lists(st.integers(-10**6, 10**6), min_size=9, max_size=9)


@given(matrices)
@settings(max_examples=200)
def test_lll_postconditions(flat):
    cols = (tuple(flat[0:3]), tuple(flat[3:6]), tuple(flat[6:9]))
    assume(_det(cols) != 0)
    red = lll_reduce(LatticeBasis3(cols))
    assert _reduced_exactly(red.columns)
    assert abs(_det(red.columns)) == abs(_det(cols))
    u = red.transform
    assert abs(_det(u)) == 1
    for i in range(3):
        combo = tuple(sum(u[i][k] * cols[k][t] for k in range(3)) for t in range(3))
        assert combo == red.columns[i]


def test_toy_lower_bound_against_brute_force():
    res = lll_lower_bound(10**6, 10)
    ctx = mpmath.MPContext()
    ctx.dps = 40
    logs = (ctx.log(2), ctx.log((1 + ctx.sqrt(5)) / 2), ctx.log(ctx.sqrt(5)))
    best = min(abs(x1 * logs[0] + x2 * logs[1] + x3 * logs[2])
               for x1, x2, x3 in itertools.product(range(-10, 11), repeat=3)
               if (x1, x2, x3) != (0, 0, 0))
    assert 0 < res.lambda_lower
    assert Fraction(res.lambda_lower) <= Fraction(str(best))


def test_gate_and_preconditions():
    with pytest.raises(UsageError):
        lll_lower_bound(1000, 10)
    with pytest.raises(GateFailed):
        lll_lower_bound(10**188, m_of(103 * 10**13))


def test_round_one_and_two():
    r1 = lll_round(103 * 10**13)
    assert 6.37e-128 <= r1.result.lambda_lower <= 6.37e-126
    assert r1.n_bound <= 1800
    r2 = lll_round(1694)
    assert 3.67e-57 <= r2.result.lambda_lower <= 3.67e-55
    assert r2.n_bound <= 1000
    assert reduce_n_bound(r1.n_bound) < 1000


def test_larger_c_gives_smaller_lambda():
    # at the published C the bound is valid but weaker than at the smallest passing C
    res = lll_lower_bound(10**192, m_of(103 * 10**13))
    assert res.lambda_lower < lll_round(103 * 10**13).result.lambda_lower


def test_largest_n_below():
    lam = Fraction(1, 10**50)
    n = largest_n_below(lam)
    g = lambda m: Fraction(366 * 10**14) * Fraction(82, 100) ** m * m
    assert lam < g(n) and not lam < g(n + 1)
