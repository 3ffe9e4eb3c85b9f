"""Command-line entry point.

Exit codes: 0 success, 1 mathematical failure, 2 usage error, 3 precision cap.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import __version__
from .bounds import absolute_bound_n
from .errors import PrecisionCapExceeded, ThueFamError, UsageError
from .family import make_instance, verify_lemmas
from .lattice import TARGET_N, final_bound_chain
from .numerics import DEFAULT_PREC, PREC_CAP
from .reduction import DEFAULT_MAX_CONVERGENTS, ReductionConfig, reduce_case, sweep
from .search import brute_search, check_solution

EXIT_OK, EXIT_MATH, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
CONFIG_ENV = "THUEFAM_CONFIG"


@dataclass
class Config:
    default_prec_bits: int = DEFAULT_PREC
    prec_cap_bits: int = PREC_CAP
    max_convergents: int = DEFAULT_MAX_CONVERGENTS
    jobs: int = 1


def load_config(path: str | None = None) -> Config:
    """Read key = value lines from ``path`` (or $THUEFAM_CONFIG) over the defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    cfg = Config()
    if not path:
        return cfg
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[thuefam]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for key, raw in parser["thuefam"].items():
        if not hasattr(cfg, key):
            raise UsageError(f"unknown config key {key!r}")
        try:
            setattr(cfg, key, int(raw))
        except ValueError as exc:
            raise UsageError(f"config key {key!r} needs an integer") from exc
    return cfg


def _reduction_config(cfg: Config, args) -> ReductionConfig:
    return ReductionConfig(
        prec_bits=args.prec or cfg.default_prec_bits,
        prec_cap_bits=cfg.prec_cap_bits,
        max_convergents=getattr(args, "max_convergents", None) or cfg.max_convergents,
    )


def _fmt(x, digits: int = 6) -> str:
    if isinstance(x, Fraction):
        x = mpmath.mpf(x.numerator) / x.denominator
    return mpmath.nstr(mpmath.mpf(x), digits)


# -- commands ----------------------------------------------------------------

def cmd_verify_lemmas(args, cfg: Config, out) -> int:
    if args.n < 3:
        raise UsageError("verify-lemmas needs n >= 3")
    rep = verify_lemmas(args.n, args.prec or cfg.default_prec_bits, cfg.prec_cap_bits)
    print(f"n = {rep.n}  (precision {rep.prec_bits} bits)", file=out)
    print(f"regulator R = {rep.system.regulator.nstr(12)}", file=out)
    if not rep.envelopes_checked:
        print("envelopes skipped (n < 29)", file=out)
        return EXIT_OK
    for i, ok in enumerate(rep.root_checks, 1):
        print(f"{'PASS' if ok else 'FAIL'}  |alpha^({i}) - G_{i}| < 0.5^n", file=out)
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<18} margin {c.margin:.6g}", file=out)
    return EXIT_OK if rep.passed else EXIT_MATH


def cmd_reduce(args, cfg: Config, out) -> int:
    cert = reduce_case(args.n, args.type, _reduction_config(cfg, args))
    summary = cert.summary()
    if args.json:
        print(json.dumps(summary.to_dict(), indent=2), file=out)
    else:
        print(f"n = {cert.n}, j = {cert.j}", file=out)
        print(f"q = {cert.q}", file=out)
        print(f"epsilon >= {summary.epsilon_lower}", file=out)
        print(f"Y = {summary.Y}  (convergents scanned: {cert.convergents_checked}, "
              f"precision {cert.prec_bits} bits)", file=out)
        print(f"solutions with 2 <= y < Y: {list(cert.solutions_found) or 'none'}", file=out)
    return EXIT_MATH if cert.solutions_found else EXIT_OK


def cmd_sweep(args, cfg: Config, out) -> int:
    jobs = args.jobs or cfg.jobs

    def progress(n, j, status, secs):
        if args.verbose:
            print(f"n={n} j={j} {status} {secs:.2f}s", file=sys.stderr)

    report = sweep(args.n_from, args.n_to, jobs, _reduction_config(cfg, args), progress)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    nontrivial = [s for s in report.solutions if not s.is_trivial]
    print(f"cases reduced: {len(report.cases)}, failures: {len(report.failures)}, "
          f"non-trivial solutions: {len(nontrivial)}", file=out)
    print(f"report written to {args.out}", file=out)
    if report.failures and all(f["kind"] == "precision_cap" for f in report.failures):
        return EXIT_CAP
    return EXIT_OK if report.ok else EXIT_MATH


def cmd_final_bound(args, cfg: Config, out) -> int:
    n_j3, n_j12 = absolute_bound_n()
    print(f"crossover: type 3 -> n < {n_j3}, types 1, 2 -> n < {n_j12} ({_fmt(n_j12, 4)})", file=out)
    chain = final_bound_chain(n_j12)
    for k, r in enumerate(chain, 1):
        print(f"round {k}: n_max = {r.n_max}, C = 10^{r.exponent}, "
              f"lambda >= {_fmt(r.result.lambda_lower, 4)}, n <= {r.n_bound}", file=out)
    final = chain[-1].n_bound if chain else n_j12
    done = final < TARGET_N
    print(f"chain: {' -> '.join([_fmt(n_j12, 4)] + [str(r.n_bound) for r in chain])}"
          f"  ({'below' if done else 'NOT below'} {TARGET_N})", file=out)
    return EXIT_OK if done else EXIT_MATH


def cmd_search(args, cfg: Config, out) -> int:
    if args.ymax < 1:
        raise UsageError("--ymax must be at least 1")
    recs = brute_search(args.n, args.ymax)
    print(f"bounded search, |y| <= {args.ymax} (non-exhaustive beyond this radius)", file=out)
    for r in recs:
        print(f"  +-({r.x}, {r.y})  rhs {r.rhs:+d}  {r.triviality}  type {r.type_j}", file=out)
    return EXIT_OK


def cmd_check(args, cfg: Config, out) -> int:
    if args.n < 1:
        raise UsageError("n must be positive")
    rec = check_solution(args.n, args.x, args.y)
    if rec is None:
        print("not a solution", file=out)
        return EXIT_OK
    value = make_instance(args.n).form(args.x, args.y)
    print(f"solution: form value {value:+d}, {rec.triviality}, type {rec.type_j}; "
          f"orbit representative ({rec.x}, {rec.y}) with rhs {rec.rhs:+d}", file=out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thuefam", description="Certified computations for a parametrised family of cubic Thue equations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help=f"key = value config file (default: ${CONFIG_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-lemmas", help="root, unit-log and regulator envelopes")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--prec", type=int)
    s.set_defaults(func=cmd_verify_lemmas)

    s = sub.add_parser("reduce", help="one Baker-Davenport reduction plus convergent check")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--type", type=int, required=True, choices=(1, 2, 3))
    s.add_argument("--prec", type=int)
    s.add_argument("--max-convergents", type=int)
    s.add_argument("--json", action="store_true", help="print the certificate as JSON")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("sweep", help="reduce every (n, j) in a range")
    s.add_argument("--from", dest="n_from", type=int, required=True)
    s.add_argument("--to", dest="n_to", type=int, required=True)
    s.add_argument("--jobs", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--prec", type=int)
    s.add_argument("--max-convergents", type=int)
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("final-bound", help="crossover bound followed by LLL rounds")
    s.set_defaults(func=cmd_final_bound)

    s = sub.add_parser("search", help="bounded brute-force search")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--ymax", type=int, required=True)
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("check", help="exact check of one pair")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--y", type=int, required=True)
    s.set_defaults(func=cmd_check)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionCapExceeded as exc:
        print(f"precision cap reached: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ThueFamError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_MATH
