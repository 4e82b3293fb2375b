"""L^p norms of the discrepancy function.

Two routes are available. Even integer p (and p = 1) integrate Delta_N^p
exactly as a rational. Any real p uses the per-segment antiderivative
-(u |u|^p) / (N (p + 1)) with u = j - N x, evaluated in extended precision
and summed with :func:`math.fsum`, so the total does not depend on the order
or partitioning of the segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .discrepancy import DiscrepancyProfile, integral_delta, integral_delta_against_poly
from .errors import DomainError

P_MAX = 64
INF = math.inf


@dataclass(frozen=True)
class LpValue:
    p: float
    value: float
    exact: bool  # integrand integrated as an exact rational


def _check_p(p) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise DomainError("p must be >= 1")
    if p > P_MAX:
        raise DomainError(f"p must be <= {P_MAX}; use sup_norm beyond that")
    return p


def rational_root(value: Fraction, p: float) -> float:
    """value^(1/p) for a nonnegative rational, without overflowing floats."""
    if value < 0:
        raise DomainError("negative integrand")
    if value == 0:
        return 0.0
    return math.exp((math.log(value.numerator) - math.log(value.denominator)) / p)


def _exact_sum_longdouble(terms: np.ndarray) -> float:
    hi = terms.astype(np.float64)
    lo = (terms - hi.astype(np.longdouble)).astype(np.float64)
    return math.fsum(np.concatenate([hi, lo]).tolist())


def power_integral_sorted(ys: np.ndarray, D: int, N: int, p: float) -> float:
    """int_0^1 |Delta_N|^p for sorted breakpoint numerators ``ys`` over D."""
    ys = np.asarray(ys, dtype=np.int64)
    j = np.arange(1, N + 1, dtype=np.int64)
    his = np.empty_like(ys)
    his[:-1] = ys[1:]
    his[-1] = D
    dtype = np.longdouble
    Dl = dtype(D)
    u_lo = (j * D - N * ys).astype(dtype) / Dl
    u_hi = (j * D - N * his).astype(dtype) / Dl
    e = dtype(p)
    terms = np.abs(u_lo) ** e * u_lo - np.abs(u_hi) ** e * u_hi
    return _exact_sum_longdouble(terms) / (N * (p + 1))


def lp_norm_closed_form(profile: DiscrepancyProfile, p) -> LpValue:
    """General real p route."""
    p = _check_p(p)
    integral = power_integral_sorted(profile.ys, profile.denominator, profile.N, p)
    return LpValue(p, integral ** (1.0 / p), False)


def lp_power_exact(profile: DiscrepancyProfile, p: int) -> Fraction:
    """Exact int_0^1 Delta_N^p for integer p; equals int |Delta_N|^p since Delta_N >= 0."""
    if p == 1:
        return integral_delta(profile)
    return integral_delta_against_poly(profile, 0, p)


def lp_norm(profile: DiscrepancyProfile, p) -> LpValue:
    p = _check_p(p)
    if p == 1 or (p.is_integer() and int(p) % 2 == 0):
        return LpValue(p, rational_root(lp_power_exact(profile, int(p)), p), True)
    return lp_norm_closed_form(profile, p)


def sup_norm_exact(profile: DiscrepancyProfile) -> Fraction:
    """Essential supremum of |Delta_N| over both one-sided limits at every breakpoint."""
    D, N = profile.denominator, profile.N
    ys = profile.ys.tolist()
    his = ys[1:] + [D]
    best = 0
    for j, lo, hi in zip(range(1, N + 1), ys, his):
        best = max(best, abs(j * D - N * lo), abs(j * D - N * hi))
    return Fraction(best, D)


def sup_norm(profile: DiscrepancyProfile) -> float:
    return float(sup_norm_exact(profile))


def discrepancy_envelope(N: int, b: int) -> float:
    """(b/4) log_b N + b."""
    return b / 4 * (math.log(N) / math.log(b)) + b


@dataclass(frozen=True)
class LpExcessReport:
    N: int
    base: int
    p: int
    difference: Fraction  # int Delta^p - S(N)^p
    ratio: float  # difference / (b^p (log_b N + 1)^(p-1))


def lp_minus_s_bound_report(profile: DiscrepancyProfile, p: int) -> LpExcessReport:
    if int(p) != p or p < 2 or p % 2:
        raise DomainError("p must be an even integer >= 2")
    p = int(p)
    s = integral_delta(profile)
    diff = lp_power_exact(profile, p) - s**p
    b, N = profile.base, profile.N
    scale = float(b) ** p * (math.log(N) / math.log(b) + 1) ** (p - 1)
    return LpExcessReport(N, int(b), p, diff, float(diff) / scale)
