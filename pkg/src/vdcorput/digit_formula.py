"""Closed forms for S(N) in terms of the base-b digits of N.

S(N) = sum_i ((b+1) a_i - a_i^2) / (2b) - sum_{i<j} a_i a_j / b^(j-i+1).

With m digits, multiplying by 2 b^m clears every denominator:

    2 b^m S(N) = b^(m-1) sum_i ((b+1) a_i - a_i^2) - 2 sum_j a_j b^(m-j) P_j,

where P_j = sum_{i<j} a_i b^(i-1) is N reduced mod b^(j-1). Carrying P_j as a
running value gives an O(m) integer evaluation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import DomainError, InvariantError, ResourceCapError
from .radix_core import Base, DigitVec, digits_of

ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class MomentConstants:
    base: Base
    c_b: Fraction
    d_b: Fraction


def moment_constants(base) -> MomentConstants:
    b = Base(base)
    c = Fraction(b * b - 1, 12 * b)
    d = Fraction(b**4 + 120 * b**3 - 480 * b**2 + 600 * b - 241, 720 * b * b)
    return MomentConstants(b, c, d)


def variance_growth(base) -> Fraction:
    """Per-digit growth rate of Var S(N), from expanding the digit formula.

    Equals (b^4 - 1) / (720 b^2). It coincides with ``moment_constants(b).d_b``
    only for b = 2; the enumerated variances follow this value for every base.
    """
    b = Base(base)
    return Fraction(b**4 - 1, 720 * b * b)


def _scaled_s(n: int, b: int, m: int, powers: list[int]) -> int:
    """2 b^m S(n) for n < b^m; ``powers[k] = b^k``."""
    head = 0
    cross = 0
    low = 0
    for j in range(1, m + 1):
        n, a = divmod(n, b)
        if a:
            head += (b + 1 - a) * a
            cross += a * powers[m - j] * low
            low += a * powers[j - 1]
    return powers[m - 1] * head - 2 * cross


def s_of_n_digits(digits: DigitVec) -> Fraction:
    """S(N) from the digit vector of N in O(m)."""
    b, m = digits.base, digits.m
    if m == 0:
        return Fraction(0)
    powers = [b**k for k in range(m + 1)]
    head = 0
    cross = 0
    low = 0
    for j, a in enumerate(digits.digits, start=1):
        head += (b + 1 - a) * a
        cross += a * powers[m - j] * low
        low += a * powers[j - 1]
    return Fraction(powers[m - 1] * head - 2 * cross, 2 * powers[m])


def s_of_n(N: int, base) -> Fraction:
    return s_of_n_digits(digits_of(N, base))


def s_of_n_literal(digits: DigitVec) -> Fraction:
    """The O(m^2) double sum, term by term. Reference only."""
    b = digits.base
    a = digits.digits
    single = sum(Fraction((b + 1) * ai - ai * ai, 2 * b) for ai in a)
    pairs = sum(
        Fraction(a[i] * a[j], b ** (j - i + 1))
        for i in range(len(a))
        for j in range(i + 1, len(a))
    )
    return single - pairs


def expected_s(base, m: int) -> Fraction:
    """Mean of S(N) for N uniform on {0, ..., b^m - 1}."""
    b = Base(base)
    if m < 1:
        raise DomainError("m must be >= 1")
    return Fraction((b * b - 1) * m, 12 * b) + Fraction(1, 4) - Fraction(1, 4 * b**m)


def _check_enumeration(b: int, m: int) -> None:
    if m < 1:
        raise DomainError("m must be >= 1")
    if b**m > ENUMERATION_CAP:
        raise ResourceCapError(f"{b}^{m} exceeds the enumeration cap {ENUMERATION_CAP}")


def scaled_s_table(base, m: int) -> list[int]:
    """[2 b^m S(N) for N in range(b^m)] by the digit formula."""
    b = Base(base)
    _check_enumeration(b, m)
    powers = [b**k for k in range(m + 1)]
    return [_scaled_s(n, b, m, powers) for n in range(powers[m])]


def _central_moments(values: list[int], scale: int, order: int) -> list[Fraction]:
    count = len(values)
    total = sum(values)
    devs = [count * v - total for v in values]
    out = []
    for k in range(1, order + 1):
        out.append(Fraction(sum(d**k for d in devs), count * (count * scale) ** k))
    return out


def brute_moments(base, m: int, order: int) -> list[Fraction]:
    """Exact central moments of orders 1..order of S(N), N uniform on [0, b^m).

    Entry ``k - 1`` is the k-th central moment; the mean is centred exactly from
    the enumeration.
    """
    b = Base(base)
    if order < 2 or order % 2:
        raise DomainError("order must be a positive even integer")
    values = scaled_s_table(b, m)
    return _central_moments(values, 2 * b**m, order)


def brute_mean(base, m: int) -> Fraction:
    b = Base(base)
    values = scaled_s_table(b, m)
    return Fraction(sum(values), len(values) * 2 * b**m)


def variance_drift(base, m_max: int) -> list[tuple[int, Fraction]]:
    """(m, Var_m - d(b) m) for m = 1..m_max."""
    b = Base(base)
    _check_enumeration(b, m_max)
    d = moment_constants(b).d_b
    return [(m, brute_moments(b, m, 2)[1] - d * m) for m in range(1, m_max + 1)]


def prop8_q(a: int, c: float) -> float:
    """q = (2 / (1 - e^-c))^(a + 1/2)."""
    if c <= 0:
        raise DomainError("decay c must be positive")
    return (2.0 / -math.expm1(-c)) ** (a + 0.5)


def prop8_g(a: int, x: float) -> float:
    """g(x) = sum_k x^(2ak) / (2ak)!, summed until terms are negligible."""
    if x < 0:
        raise DomainError("x must be >= 0")
    step = 2 * a
    total = 1.0
    term = 1.0
    n = 0
    while True:
        for i in range(1, step + 1):
            term *= x / (n + i)
        n += step
        total += term
        if term < 1e-16 * total:
            return total


@dataclass(frozen=True)
class WeakDepFamily:
    """Functions f_A of the digits indexed by A, a subset of {1..m}, |A| <= arity.

    ``terms`` maps a sorted tuple A to a callable taking the digits on A;
    subsets without an entry are the zero function. Conditions are verified
    on the digit alphabet {0, ..., base - 1} at construction.
    """

    m: int
    arity: int
    decay: float
    base: Base
    terms: dict[tuple[int, ...], Callable[..., Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        if self.m < 2 or self.arity < 2 or self.arity > self.m:
            raise DomainError("need 2 <= arity <= m")
        if self.decay <= 0:
            raise DomainError("decay must be positive")
        object.__setattr__(self, "base", Base(self.base))
        for A in self.terms:
            if list(A) != sorted(set(A)) or len(A) > self.arity or (A and not 1 <= A[0] <= A[-1] <= self.m):
                raise DomainError(f"bad index set {A!r}")
        self.validate(self.base)

    def validate(self, base) -> None:
        """Raise InvariantError unless every f_A is centred and decays in diam A."""
        for A, f in self.terms.items():
            if not A:
                value = f()
                if value != 0:
                    raise InvariantError("f_{} must vanish")
                continue
            limit = math.exp(-self.decay * (A[-1] - A[0])) * (1 + 1e-12)
            total = 0
            count = 0
            for xs in itertools.product(range(base), repeat=len(A)):
                v = f(*xs)
                if abs(v) > limit:
                    raise InvariantError(f"|f_{A}{xs}| = {float(abs(v))} exceeds {limit}")
                total += v
                count += 1
            mean = total / count
            if (mean != 0) if isinstance(mean, Fraction) else abs(mean) > 1e-12:
                raise InvariantError(f"f_{A} is not centred (mean {float(mean)})")

    def evaluate(self, digits) -> Fraction:
        """sum_A f_A(digits on A) with digits a_1..a_m (0-based sequence)."""
        return sum((f(*(digits[i - 1] for i in A)) for A, f in self.terms.items()), Fraction(0))


def standard_family_for_s(base, m: int) -> WeakDepFamily:
    """Family with S(N) - E S(N) = (3/4) b sum_A f_A(a_A), arity 2, decay log 2."""
    b = Base(base)
    if m < 2:
        raise DomainError("m must be >= 2")
    scale = Fraction(4, 3 * b)
    mean_a = Fraction(b - 1, 2)
    mean_a2 = Fraction((b - 1) * (2 * b - 1), 6)
    mean_single = ((b + 1) * mean_a - mean_a2) / (2 * b)
    mean_pair = mean_a * mean_a / b

    def single(x):
        return scale * (Fraction((b + 1) * x - x * x, 2 * b) - mean_single)

    def pair(gap):
        weight = scale / Fraction(b) ** gap

        def f(x, y):
            return -weight * (Fraction(x * y, b) - mean_pair)

        return f

    terms: dict[tuple[int, ...], Callable[..., Fraction]] = {(): lambda: Fraction(0)}
    for i in range(1, m + 1):
        terms[(i,)] = single
        for j in range(i + 1, m + 1):
            terms[(i, j)] = pair(j - i)
    return WeakDepFamily(m=m, arity=2, decay=math.log(2), base=b, terms=terms)


def standard_family_identity_holds(base, m: int) -> bool:
    """Check S(N) - E S(N) == (3/4) b sum_A f_A over every N < b^m, exactly."""
    b = Base(base)
    _check_enumeration(b, m)
    family = standard_family_for_s(b, m)
    mean = expected_s(b, m)
    factor = Fraction(3 * b, 4)
    for n in range(b**m):
        digits = digits_of(n, b).padded_to(m)
        if s_of_n_digits(digits) - mean != factor * family.evaluate(digits.digits):
            return False
    return True


@dataclass(frozen=True)
class MomentBoundReport:
    k: int
    moment: Fraction
    bound: float
    satisfied: bool


def check_prop8_moment_bound(family: WeakDepFamily, base, k: int) -> MomentBoundReport:
    """Exact E(sum_A f_A)^(2k) over uniform digits against q^(2k) (2ak)! m^k."""
    b = Base(base)
    if k not in (1, 2):
        raise DomainError("k must be 1 or 2")
    _check_enumeration(b, family.m)
    family.validate(b)
    power = 2 * k
    total = Fraction(0)
    count = 0
    for xs in itertools.product(range(b), repeat=family.m):
        total += family.evaluate(xs) ** power
        count += 1
    moment = total / count
    a = family.arity
    bound = prop8_q(a, family.decay) ** power * math.factorial(2 * a * k) * family.m**k
    return MomentBoundReport(k, moment, bound, moment <= bound)
