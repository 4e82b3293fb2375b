"""The discrepancy function of a van der Corput prefix as exact pieces.

For the first N points sorted as 0 = y_1 < y_2 < ... < y_N, the function
Delta_N(x) = #{n < N : x_n < x} - N x equals j - N x on the open segment
(y_j, y_{j+1}) with y_{N+1} = 1. All breakpoints share the denominator b^m,
so they are stored as sorted integer numerators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ResourceCapError
from .radix_core import Base, PREFIX_CAP, check_index, levels_for, radical_inverse_array


@dataclass(frozen=True)
class DiscrepancyProfile:
    N: int
    base: Base
    m: int
    ys: np.ndarray  # sorted breakpoint numerators over b^m, int64

    @property
    def denominator(self) -> int:
        return self.base**self.m

    @property
    def breakpoints(self) -> list[Fraction]:
        D = self.denominator
        return [Fraction(int(y), D) for y in self.ys]

    @property
    def counts(self) -> range:
        # count_j on (y_j, y_{j+1}); segment 0 is the empty interval (0, y_1 = 0)
        return range(self.N + 1)

    def segments(self):
        """Yield (left, right, count) with integer endpoints over b^m."""
        ys = self.ys.tolist()
        ends = ys[1:] + [self.denominator]
        for j, (lo, hi) in enumerate(zip(ys, ends), start=1):
            yield lo, hi, j

    def one_sided_values(self):
        """(right limit at left end, left limit at right end) per segment."""
        D, N = self.denominator, self.N
        for lo, hi, j in self.segments():
            yield Fraction(j * D - N * lo, D), Fraction(j * D - N * hi, D)

    def __call__(self, x) -> Fraction:
        return eval_delta(self, x)


def build_profile(N: int, base, cap: int | None = None) -> DiscrepancyProfile:
    b = Base(base)
    N = check_index(N, "N")
    if N < 1:
        raise DomainError("N must be >= 1")
    if N > (PREFIX_CAP if cap is None else cap):
        raise ResourceCapError(f"N={N} exceeds the profile cap")
    m = levels_for(N, b)
    ys = np.sort(radical_inverse_array(0, N, b, m))
    ys.flags.writeable = False
    return DiscrepancyProfile(N, b, m, ys)


def eval_delta(profile: DiscrepancyProfile, x) -> Fraction:
    """Delta_N(x) with the strict inequality x_n < x."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise DomainError("x must lie in [0, 1]")
    # y/D < x  <=>  y < ceil(x D) for integer y
    limit = math.ceil(x * profile.denominator)
    count = int(np.searchsorted(profile.ys, limit, side="left"))
    return count - profile.N * x


def s_of_n_direct(N: int, base, cap: int | None = None) -> Fraction:
    """S(N) = sum_{n<N} (1/2 - x_n) by direct summation."""
    b = Base(base)
    N = check_index(N, "N")
    if N == 0:
        return Fraction(0)
    if N > (PREFIX_CAP if cap is None else cap):
        raise ResourceCapError(f"N={N} exceeds the summation cap")
    m = levels_for(N, b)
    D = b**m
    total = sum(radical_inverse_array(0, N, b, m).tolist())
    return Fraction(N * D - 2 * total, 2 * D)


def integral_delta(profile: DiscrepancyProfile) -> Fraction:
    """Exact integral of Delta_N over [0, 1], one linear piece at a time."""
    D, N = profile.denominator, profile.N
    # int_{lo/D}^{hi/D} (j - N x) dx = (2 j D (hi - lo) - N (hi^2 - lo^2)) / (2 D^2)
    ys = profile.ys.tolist()
    his = ys[1:] + [D]
    acc = sum(
        2 * j * D * (hi - lo) - N * (hi * hi - lo * lo)
        for j, lo, hi in zip(range(1, N + 1), ys, his)
    )
    return Fraction(acc, 2 * D * D)


def integral_delta_against_poly(profile: DiscrepancyProfile, shift, power: int) -> Fraction:
    """Exact value of int_0^1 (Delta_N(x) - shift)^power dx."""
    if int(power) != power or power < 1:
        raise DomainError("power must be a positive integer")
    shift = Fraction(shift)
    p, q = shift.numerator, shift.denominator
    D, N = profile.denominator, profile.N
    k1 = power + 1
    # on a piece, u = j - shift - N x; scaled by qD it is an integer at breakpoints,
    # and int u^k dx = (u(lo)^(k+1) - u(hi)^(k+1)) / (N (k+1))
    qD, qN, pD = q * D, q * N, p * D
    ys = profile.ys.tolist()
    his = ys[1:] + [D]
    acc = sum(
        (top - qN * lo) ** k1 - (top - qN * hi) ** k1
        for top, lo, hi in zip(range(qD - pD, qD * (N + 1) - pD, qD), ys, his)
    )
    return Fraction(acc, qD**k1 * N * k1)
