"""Per-(n, j) Baker-Davenport reduction and convergent enumeration."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .bounds import bound_u, upper_bound_logy
from .errors import (InsufficientPrecision, PrecisionCapExceeded, ReductionFailed,
                     ThueFamError, UsageError)
from .family import FamilyInstance, RootTriple, isolate_roots, make_instance
from .numerics import DEFAULT_PREC, PREC_CAP, PrecReal, cf_expand, mpf_to_fraction, with_precision
from .report import CaseSummary, SweepReport
from .search import check_solution

MIN_N = 29
K_EXP = 3
DEFAULT_MAX_CONVERGENTS = 10_000


@dataclass(frozen=True)
class ReductionConfig:
    prec_bits: int = DEFAULT_PREC
    prec_cap_bits: int = PREC_CAP
    max_convergents: int = DEFAULT_MAX_CONVERGENTS

    def as_dict(self) -> dict:
        return {"default_prec_bits": self.prec_bits, "prec_cap_bits": self.prec_cap_bits,
                "max_convergents": self.max_convergents}


@dataclass(frozen=True)
class LinearFormSpec:
    """|log gamma0 + u1 log gamma1 + u2 log gamma2| < c_rhs |y|^-k_exp, |u_i| <= M."""

    n: int
    j: int
    k: int
    l: int
    gamma0: PrecReal
    gamma1: PrecReal
    gamma2: PrecReal
    M: Fraction
    c_rhs: Fraction
    k_exp: int
    instance: FamilyInstance = field(repr=False)
    prec_bits: int = DEFAULT_PREC

    @property
    def logs(self) -> tuple:
        return self.gamma0.log(), self.gamma1.log(), self.gamma2.log()


def other_indices(j: int) -> tuple:
    if j not in (1, 2, 3):
        raise UsageError(f"type j must be 1, 2 or 3, got {j!r}")
    return tuple(i for i in (1, 2, 3) if i != j)


def build_linear_form(inst: FamilyInstance, roots: RootTriple, j: int,
                      prec_bits: int | None = None) -> LinearFormSpec:
    if inst.n < MIN_N:
        raise UsageError(f"the linear form needs n >= {MIN_N}")
    if roots.n != inst.n:
        raise UsageError("roots belong to a different family member")
    k, l = other_indices(j)
    a = roots.alphas
    aj, ak, al = a[j - 1], a[k - 1], a[l - 1]
    F = inst.G2
    g0 = abs(aj - ak) / abs(aj - al)
    g1 = abs(al / ak)
    g2 = abs((al - F) / (ak - F))
    for g in (g1, g2):
        if (g - 1).sign() == 0:  # raises when undecided
            raise UsageError("gamma equal to 1")
    M = Fraction(bound_u(inst.n, upper_bound_logy(inst.n)))
    c_rhs = Fraction(80, 5 ** inst.n)
    return LinearFormSpec(inst.n, j, k, l, g0, g1, g2, M, c_rhs, K_EXP, inst,
                          prec_bits or roots.prec_bits)


def form_at_precision(n: int, j: int, prec_bits: int) -> LinearFormSpec:
    inst = make_instance(n)
    return build_linear_form(inst, isolate_roots(inst, prec_bits), j, prec_bits)


@dataclass(frozen=True)
class ReductionCertificate:
    n: int
    j: int
    q: int
    p: int
    epsilon: PrecReal
    Y: mpmath.mpf
    Y_ceil: int
    convergents_checked: int
    prec_bits: int
    solutions_found: tuple = ()

    def summary(self) -> CaseSummary:
        return CaseSummary(
            n=self.n, j=self.j, q=self.q, p=self.p,
            epsilon_lower=mpmath.nstr(self.epsilon.lower_mpf(), 12),
            Y=mpmath.nstr(self.Y, 12), Y_ceil=self.Y_ceil,
            convergents_checked=self.convergents_checked, prec_bits=self.prec_bits,
            solutions=tuple(self.solutions_found),
        )


def epsilon_at(spec: LinearFormSpec, q: int) -> PrecReal:
    """||q theta0|| - M ||q theta1|| with theta_i = log gamma_i / log gamma2."""
    l0, l1, l2 = spec.logs
    theta0, theta1 = l0 / l2, l1 / l2
    return (q * theta0).dist_to_int() - spec.M * (q * theta1).dist_to_int()


def bd_bound(spec: LinearFormSpec, q: int, eps: PrecReal) -> PrecReal:
    """(q c / (eps |log gamma2|))^(1/k)."""
    l2 = abs(spec.gamma2.log())
    return ((q * spec.c_rhs) / (eps * l2)).cbrt()


def _bd_attempt(spec: LinearFormSpec, max_convergents: int) -> ReductionCertificate:
    l0, l1, l2 = spec.logs
    theta1 = l1 / l2
    cf = cf_expand(theta1, max_terms=max_convergents)
    threshold = 6 * spec.M
    checked = 0
    for idx, (p, q) in enumerate(cf.convergents):
        if q <= threshold:
            continue
        checked = idx + 1
        eps = epsilon_at(spec, q)
        s = eps.sign()
        if s == 0:
            raise InsufficientPrecision("epsilon not separated from zero")
        if s > 0:
            Y = bd_bound(spec, q, eps)
            y_up = Y.upper()
            return ReductionCertificate(spec.n, spec.j, q, p, eps, Y.upper_mpf(),
                                        math.ceil(y_up), checked, spec.prec_bits)
    if cf.truncation == "precision":
        need = 2 * max(cf.convergents[-1][1].bit_length(), threshold.numerator.bit_length())
        raise InsufficientPrecision("continued fraction exhausted", extra_bits=need)
    raise ReductionFailed(
        f"n={spec.n}, j={spec.j}: no positive epsilon within {len(cf)} convergents")


def baker_davenport(spec: LinearFormSpec, max_convergents: int = DEFAULT_MAX_CONVERGENTS,
                    cap: int = PREC_CAP) -> ReductionCertificate:
    """First convergent of theta1 past q > 6M with certified epsilon > 0.

    On precision shortfall the roots and gammas are recomputed at a higher
    precision; the returned certificate records the precision that succeeded.
    """

    def attempt(p):
        s = spec if p == spec.prec_bits else build_linear_form(
            spec.instance, isolate_roots(spec.instance, p), spec.j, p)
        return _bd_attempt(s, max_convergents)

    # enough bits to reach q > 6M and still resolve M ||q theta1||
    start = max(spec.prec_bits, 4 * spec.M.numerator.bit_length() + 64)
    return with_precision(attempt, start, cap)


def enumerate_and_check(inst: FamilyInstance, roots: RootTriple, j: int, Y,
                        cap: int = PREC_CAP) -> list:
    """Convergents x/y of alpha^(j) with 2 <= y < Y that solve the equation.

    Returns canonical (x, y) pairs (y > 0); both right-hand sides are tested.
    """
    Yc = math.ceil(mpf_to_fraction(Y) if isinstance(Y, mpmath.mpf) else Fraction(Y))
    if Yc <= 2:
        return []
    other_indices(j)

    def attempt(p):
        r = roots if roots.prec_bits >= p else isolate_roots(inst, p)
        cf = cf_expand(r.alphas[j - 1], max_terms=10 * p)
        if cf.convergents[-1][1] < Yc and cf.truncation != "exact":
            raise InsufficientPrecision("convergents of alpha stop short of Y")
        return cf.convergents

    start = max(roots.prec_bits, 2 * Yc.bit_length() + 32)
    hits = []
    for x, y in with_precision(attempt, start, cap):
        if y >= Yc:
            break
        if y < 2:
            continue
        if inst.form(x, y) in (1, -1):
            hits.append((x, y))
    return hits


def reduce_case(n: int, j: int, config: ReductionConfig | None = None) -> ReductionCertificate:
    cfg = config or ReductionConfig()
    inst = make_instance(n)
    spec = with_precision(lambda p: form_at_precision(n, j, p), cfg.prec_bits, cfg.prec_cap_bits)
    cert = baker_davenport(spec, cfg.max_convergents, cfg.prec_cap_bits)
    roots = isolate_roots(inst, cert.prec_bits)
    sols = enumerate_and_check(inst, roots, j, cert.Y_ceil, cfg.prec_cap_bits)
    return ReductionCertificate(cert.n, cert.j, cert.q, cert.p, cert.epsilon, cert.Y, cert.Y_ceil,
                                cert.convergents_checked, cert.prec_bits, tuple(sols))


def _run_case(args) -> tuple:
    n, j, cfg = args
    t0 = time.perf_counter()
    try:
        cert = reduce_case(n, j, cfg)
        out = ("ok", cert.summary())
    except PrecisionCapExceeded as exc:
        out = ("fail", {"n": n, "j": j, "kind": "precision_cap", "message": str(exc)})
    except ThueFamError as exc:
        out = ("fail", {"n": n, "j": j, "kind": type(exc).__name__, "message": str(exc)})
    return n, j, out, time.perf_counter() - t0


def sweep(n_from: int, n_to: int, parallelism: int = 1,
          config: ReductionConfig | None = None, progress=None) -> SweepReport:
    """Reduce and enumerate every (n, j) with n_from <= n <= n_to.

    Failures are collected rather than raised; ``report.ok`` is the verdict.
    """
    if not MIN_N <= n_from <= n_to:
        raise UsageError(f"sweep needs {MIN_N} <= n_from <= n_to")
    cfg = config or ReductionConfig()
    jobs = [(n, j, cfg) for n in range(n_from, n_to + 1) for j in (1, 2, 3)]
    report = SweepReport.new({**cfg.as_dict(), "jobs": parallelism,
                              "n_from": n_from, "n_to": n_to})
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = pool.map(_run_case, jobs, chunksize=1)
            _collect(report, results, progress)
    else:
        _collect(report, map(_run_case, jobs), progress)
    report.sort()
    return report


def _collect(report: SweepReport, results, progress) -> None:
    for n, j, (status, payload), secs in results:
        report.timing[f"{n}:{j}"] = round(secs, 6)
        if status == "ok":
            report.cases.append(payload)
            for x, y in payload.solutions:
                rec = check_solution(n, x, y)
                report.solutions.append(rec)
                if not rec.is_trivial:
                    report.failures.append({"n": n, "j": j, "kind": "solution",
                                            "message": f"non-trivial solution ({x}, {y})"})
        else:
            report.failures.append(payload)
        if progress is not None:
            progress(n, j, status, secs)
