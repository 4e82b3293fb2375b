"""Command line interface.

Exit status: 0 success, 2 invalid arguments, 3 a proved bound or identity
failed to hold, 4 a size cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from fractions import Fraction

from . import digit_formula, discrepancy, harmonic, limit_stats, norms
from .errors import DomainError, InvariantError, ResourceCapError
from .limit_stats import fmt
from .radix_core import Base, sequence_prefix

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_CAP = 0, 2, 3, 4
FOURIER_TOL = 1e-10


class Failed(Exception):
    """Output was produced but a checked bound does not hold."""


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _num(x):
    """Exact rationals as strings, floats rounded to 15 significant digits."""
    if isinstance(x, Fraction):
        return _q(x)
    return fmt(float(x))


def _M(args, b: int) -> int:
    if args.m_exp is not None:
        if args.m_exp < 1:
            raise DomainError("--m-exp must be >= 1")
        return b**args.m_exp
    if args.m is None:
        raise DomainError("one of --m-exp or --m is required")
    return args.m


def _grid(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        if ":" in text:
            lo, hi, step = (float(t) for t in text.split(":"))
            if step <= 0:
                raise ValueError
            count = int(math.floor((hi - lo) / step + 1e-9)) + 1
            return [lo + k * step for k in range(count)]
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise DomainError("--grid must be LO:HI:STEP or a comma separated list") from None


def cmd_seq(args, b):
    xs = sequence_prefix(args.n, b)
    if args.format == "json":
        return _dumps({"base": b, "N": args.n, "x": [fmt(float(x)) for x in xs]})
    rows = ["n,num,den"] + [f"{n},{x.numerator},{x.denominator}" for n, x in enumerate(xs)]
    return "\n".join(rows)


def cmd_s(args, b):
    s = digit_formula.s_of_n(args.n, b)
    if args.format == "csv":
        return f"N,S\n{args.n},{_q(s)}"
    return _dumps({"N": args.n, "S": _q(s)})


def cmd_scan(args, b):
    M = _M(args, b)
    records = limit_stats.scan_s(M, b, args.mode, args.threads)

    def s_text(v):
        return _q(v) if isinstance(v, Fraction) else f"{v:.15g}"

    def z_text(z):
        return "" if z is None else f"{z:.15g}"

    if args.format == "json":
        rows = [{"N": r.N, "S": _num(r.s_value), "normalized": None if r.normalized is None else fmt(r.normalized)}
                for r in records]
        return _dumps({"M": M, "base": b, "mode": args.mode, "records": rows})
    lines = ["N,S,normalized"]
    lines.extend(f"{r.N},{s_text(r.s_value)},{z_text(r.normalized)}" for r in records)
    return "\n".join(lines)


def cmd_lp(args, b):
    profile = discrepancy.build_profile(args.n, b)
    s = discrepancy.integral_delta(profile)
    if args.p.lower() in ("inf", "infinity"):
        sup = norms.sup_norm_exact(profile)
        return _dumps({"N": args.n, "base": b, "p": "inf", "value": fmt(float(sup)), "exact_value": _q(sup),
                       "S": _q(s)})
    try:
        p = float(args.p)
    except ValueError:
        raise DomainError("--p must be a number >= 1 or 'inf'") from None
    v = norms.lp_norm(profile, p)
    return _dumps({"N": args.n, "base": b, "p": fmt(p), "value": fmt(v.value), "exact": v.exact, "S": _q(s)})


def cmd_clt(args, b):
    M = _M(args, b)
    report = limit_stats.clt_scan(M, b, _grid(args.grid), args.statistic, args.p, args.mode, args.threads)
    if args.format == "json":
        return limit_stats.clt_report_json(report)
    return limit_stats.clt_report_csv(report).rstrip("\n")


def cmd_tail(args, b):
    report = limit_stats.tail_scan(_M(args, b), b, args.lam, args.mode, args.threads)
    return limit_stats.tail_report_json(report), report.satisfied


def cmd_lp_tail(args, b):
    report = limit_stats.lp_tail_scan(_M(args, b), b, args.p, args.lam, args.A)
    return limit_stats.tail_report_json(report), report.satisfied


def cmd_expsum(args, b):
    r = harmonic.exp_sum(args.ell, args.n, b)
    out = {"ell": r.ell, "N": r.N, "base": b, "re": fmt(r.value.real), "im": fmt(r.value.imag),
           "abs": fmt(abs(r.value)), "s_min": r.s_min, "bound": r.bound, "satisfied": r.satisfied}
    return _dumps(out), r.satisfied


def _fourier_row(N, ell, b):
    lhs = harmonic.fourier_coeff_delta(discrepancy.build_profile(N, b), ell)
    rhs = harmonic.fourier_coeff_from_sum(N, ell, b)
    return {"N": N, "base": b, "ell": ell, "integral_re": fmt(lhs.real), "integral_im": fmt(lhs.imag),
            "sum_re": fmt(rhs.real), "sum_im": fmt(rhs.imag), "residual": fmt(abs(lhs - rhs))}


def cmd_fourier(args, b):
    if args.ell is not None:
        if args.n is None:
            raise DomainError("--n is required with --ell")
        row = _fourier_row(args.n, args.ell, b)
        return _dumps(row), row["residual"] < FOURIER_TOL
    rng = random.Random(args.seed)
    bases = [b] if args.fixed_base else [2, 3, 5]
    ells = [l for l in range(-args.ell_max, args.ell_max + 1) if l]
    rows = []
    for _ in range(args.trials):
        bb = rng.choice(bases)
        rows.append(_fourier_row(rng.randint(1, args.n_max), rng.choice(ells), bb))
    ok = all(r["residual"] < FOURIER_TOL for r in rows)
    if args.format == "csv":
        keys = list(rows[0]) if rows else ["N", "base", "ell", "residual"]
        lines = [",".join(keys)] + [",".join(f"{r[k]:.15g}" if isinstance(r[k], float) else str(r[k]) for k in keys)
                                    for r in rows]
        return "\n".join(lines), ok
    return _dumps({"seed": args.seed, "trials": rows}), ok


def cmd_qmc(args, b):
    f = harmonic.parse_integrand(args.f)
    try:
        d = harmonic.qmc_decompose(f, args.n, b)
    except InvariantError as exc:
        raise Failed(str(exc)) from None
    out = {"N": d.N, "base": b, "f": d.f_id, "sum_f": _num(d.sum_f), "mean_term": _num(d.mean_term),
           "jump_term": _num(d.jump_term), "remainder": _num(d.remainder), "bound": _num(d.bound),
           "satisfied": d.satisfied}
    return _dumps(out), d.satisfied


def cmd_moments(args, b):
    if args.order < 1:
        raise DomainError("--order must be >= 1")
    moments = digit_formula.brute_moments(b, args.m, args.order)
    mean = digit_formula.brute_mean(b, args.m)
    out = {"base": b, "m": args.m, "order": args.order, "mean": _q(mean),
           "variance": _q(moments[1]) if args.order >= 2 else None,
           "central_moments": {str(k): _q(v) for k, v in enumerate(moments, start=1)}}
    return _dumps(out)


def cmd_prop8(args, b):
    family = digit_formula.standard_family_for_s(b, args.m)
    report = digit_formula.check_prop8_moment_bound(family, b, args.k)
    identity = digit_formula.standard_family_identity_holds(b, args.m)
    out = {"base": b, "m": args.m, "k": args.k, "moment": _q(report.moment), "bound": fmt(report.bound),
           "satisfied": report.satisfied, "identity": identity}
    return _dumps(out), report.satisfied and identity


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", type=int, default=2, help="radix b >= 2 (default 2)")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="output format")
    common.add_argument("--out", default=None, help="write output to PATH instead of standard output")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="scan partitions run in parallel")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")

    def range_flags(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--m-exp", type=int, help="scan length M = base^EXP")
        g.add_argument("--m", type=int, help="scan length M")

    parser = argparse.ArgumentParser(prog="vdcorput", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text, fmt_default="json"):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func, fmt_default=fmt_default)
        return p

    p = add("seq", cmd_seq, "print x_0 .. x_{N-1} as exact fractions", "csv")
    p.add_argument("--n", type=int, required=True)
    p = add("s", cmd_s, "S(N) as an exact fraction")
    p.add_argument("--n", type=int, required=True)
    p = add("scan", cmd_scan, "S(N) and its normalized value for 0 <= N < M", "csv")
    range_flags(p)
    p.add_argument("--mode", choices=["exact", "fast"], default="exact")
    p = add("lp", cmd_lp, "L^p norm of the discrepancy function (p may be 'inf')")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", default="2")
    p = add("clt", cmd_clt, "empirical distribution of the normalized statistic against Phi", "csv")
    range_flags(p)
    p.add_argument("--grid", help="lambda grid LO:HI:STEP or comma list (default -4:4:0.25)")
    p.add_argument("--statistic", choices=["s", "lp"], default="s")
    p.add_argument("--p", type=float, default=None, help="exponent for --statistic lp")
    p.add_argument("--mode", choices=["exact", "fast"], default="fast")
    p = add("tail", cmd_tail, "large deviation frequency of S(N) against its bound")
    range_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--mode", choices=["exact", "fast"], default="exact")
    p = add("lp-tail", cmd_lp_tail, "large deviation frequency of ||Delta_N||_p against exp(-sqrt(lambda))")
    range_flags(p)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--A", type=float, required=True, help="threshold constant")
    p = add("expsum", cmd_expsum, "exponential sum over the first N points and its bound")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p = add("fourier", cmd_fourier, "Fourier coefficient of Delta_N by integration and by exponential sum")
    p.add_argument("--n", type=int)
    p.add_argument("--ell", type=int, help="single coefficient; omit for a seeded random suite")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--n-max", type=int, default=1024)
    p.add_argument("--ell-max", type=int, default=40)
    p.add_argument("--fixed-base", action="store_true", help="random suite uses --base only")
    p = add("qmc", cmd_qmc, "quasi-Monte Carlo decomposition of sum f(x_n)")
    p.add_argument("--f", required=True, help="poly:c0,c1,... | trig:sin|cos,k,amp | exp:a")
    p.add_argument("--n", type=int, required=True)
    p = add("moments", cmd_moments, "exact central moments of S(N) over N < base^m")
    p.add_argument("--m", type=int, required=True, help="number of digits")
    p.add_argument("--order", type=int, default=2)
    p = add("prop8-check", cmd_prop8, "exact moment bound for the weakly dependent family of S(N)")
    p.add_argument("--m", type=int, required=True, help="number of digits")
    p.add_argument("--k", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.fmt_default
    ok = True
    try:
        b = int(Base(args.base))
        if args.threads < 1:
            raise DomainError("--threads must be >= 1")
        result = args.func(args, b)
        if isinstance(result, tuple):
            result, ok = result
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (Failed, InvariantError) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    text = result + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not ok:
        print("invariant violated: a checked bound does not hold", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK
