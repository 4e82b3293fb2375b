"""Base-b digits, the radical inverse and exact rationals.

Exact values are carried as :class:`fractions.Fraction`; indices are plain
Python integers restricted to the unsigned 64-bit range.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ResourceCapError

ExactRational = Fraction

INDEX_LIMIT = 2**64
PREFIX_CAP = 2**22


class Base(int):
    """Integer radix b >= 2."""

    def __new__(cls, b):
        if isinstance(b, bool) or int(b) != b:
            raise DomainError(f"base must be an integer, got {b!r}")
        if b < 2:
            raise DomainError("base must be >= 2")
        return super().__new__(cls, int(b))


def check_index(n, name="n"):
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"{name} must be an integer")
    n = int(n)
    if n < 0:
        raise DomainError(f"{name} must be >= 0")
    if n >= INDEX_LIMIT:
        raise DomainError(f"{name} must be < 2**64")
    return n


@dataclass(frozen=True)
class DigitVec:
    """Digits a_1..a_m of an integer, least significant first.

    ``padded`` marks vectors that may carry leading (most significant) zeros.
    """

    base: Base
    digits: tuple[int, ...]
    padded: bool = False

    def __post_init__(self):
        object.__setattr__(self, "base", Base(self.base))
        object.__setattr__(self, "digits", tuple(int(a) for a in self.digits))
        for a in self.digits:
            if not 0 <= a < self.base:
                raise DomainError(f"digit {a} out of range for base {self.base}")
        if self.digits and self.digits[-1] == 0 and not self.padded:
            raise DomainError("leading zero digit in a canonical DigitVec")

    @property
    def m(self) -> int:
        return len(self.digits)

    def value(self) -> int:
        v = 0
        for a in reversed(self.digits):
            v = v * self.base + a
        return v

    def padded_to(self, m: int) -> DigitVec:
        if m < self.m:
            raise DomainError("cannot pad to fewer digits")
        return DigitVec(self.base, self.digits + (0,) * (m - self.m), padded=True)

    @classmethod
    def from_integer(cls, n: int, base) -> DigitVec:
        return digits_of(n, base)


def digits_of(n: int, base) -> DigitVec:
    """Canonical base-b expansion of ``n``; ``n = 0`` gives no digits."""
    b = Base(base)
    n = check_index(n)
    out = []
    while n:
        n, a = divmod(n, b)
        out.append(a)
    return DigitVec(b, tuple(out))


def digit_count(n: int, base) -> int:
    """Number of base-b digits of ``n`` (0 for n = 0)."""
    b = Base(base)
    m = 0
    while n:
        n //= b
        m += 1
    return m


def radical_inverse(n: int, base) -> Fraction:
    """x_n = sum a_i / b^i for n = sum a_i b^(i-1)."""
    b = Base(base)
    n = check_index(n)
    num, den = 0, 1
    while n:
        n, a = divmod(n, b)
        num = num * b + a
        den *= b
    return Fraction(num, den)


def radical_inverse_numerator(n: int, b: int, m: int) -> int:
    """Integer r with x_n = r / b^m; requires n < b^m."""
    r = 0
    for _ in range(m):
        n, a = divmod(n, b)
        r = r * b + a
    return r


def sequence_prefix(N: int, base, cap: int | None = None) -> list[Fraction]:
    """[x_0, ..., x_{N-1}]."""
    b = Base(base)
    N = check_index(N, "N")
    if N < 1:
        raise DomainError("N must be >= 1")
    if N > (PREFIX_CAP if cap is None else cap):
        raise ResourceCapError(f"N={N} exceeds the prefix cap")
    return [radical_inverse(n, b) for n in range(N)]


def levels_for(M: int, b: int) -> int:
    """Smallest m >= 1 with b^m >= M."""
    m, p = 1, b
    while p < M:
        p *= b
        m += 1
    return m


def radical_inverse_array(start: int, stop: int, b: int, m: int) -> np.ndarray:
    """Numerators r_n of x_n = r_n / b^m for start <= n < stop, as int64.

    Requires stop <= b^m < 2^63.
    """
    if b**m >= 2**63:
        raise ResourceCapError("b^m does not fit in a signed 64-bit integer")
    n = np.arange(start, stop, dtype=np.int64)
    r = np.zeros_like(n)
    for _ in range(m):
        r *= b
        r += n % b
        n //= b
    return r
