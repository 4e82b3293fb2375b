"""Exponential sums over the sequence, Fourier coefficients of Delta_N and the
quasi-Monte Carlo decomposition

    sum_{n<N} f(x_n) = N int f - (f(1) - f(0)) S(N) + remainder.

Phases e(l x_n) are reduced exactly: with x_n = r_n / b^m, l r_n is taken mod
b^m in integers before a single cosine/sine evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .digit_formula import s_of_n
from .discrepancy import DiscrepancyProfile
from .errors import DomainError, InvariantError, ResourceCapError
from .radix_core import PREFIX_CAP, Base, check_index, levels_for, radical_inverse_array

TWO_PI = 2 * math.pi


def b_adic_valuation(ell: int, base) -> int:
    b = Base(base)
    if ell == 0:
        raise DomainError("ell must be nonzero")
    ell = abs(int(ell))
    v = 0
    while ell % b == 0:
        ell //= b
        v += 1
    return v


def _phases(ell: int, r: np.ndarray, D: int) -> np.ndarray:
    """(ell * r) mod D as float64 angles 2 pi k / D."""
    lm = int(ell) % D
    if D * D < 2**63:
        k = (lm * r) % D
    else:
        k = np.array([(lm * int(x)) % D for x in r.tolist()], dtype=np.float64)
    return TWO_PI * (k.astype(np.float64) / D)


def _prefix_points(N: int, b: int) -> tuple[np.ndarray, int]:
    if N > PREFIX_CAP:
        raise ResourceCapError(f"N={N} exceeds the prefix cap")
    m = levels_for(N, b)
    return radical_inverse_array(0, N, b, m), b**m


@dataclass(frozen=True)
class ExpSumResult:
    ell: int
    N: int
    base: int
    value: complex
    s_min: int
    bound: int

    @property
    def satisfied(self) -> bool:
        return abs(self.value) < self.bound


def exp_sum(ell: int, N: int, base) -> ExpSumResult:
    """sum_{n<N} e^(2 pi i ell x_n) with the bound b^(v_b(ell) + 1)."""
    b = Base(base)
    N = check_index(N, "N")
    if N < 1:
        raise DomainError("N must be >= 1")
    s = b_adic_valuation(ell, b) + 1
    r, D = _prefix_points(N, b)
    ang = _phases(ell, r, D)
    value = complex(math.fsum(np.cos(ang).tolist()), math.fsum(np.sin(ang).tolist()))
    return ExpSumResult(int(ell), N, int(b), value, s, b**s)


def exp_sum_prefixes(ell: int, N_max: int, base) -> np.ndarray:
    """Partial sums for N = 1..N_max (entry N - 1)."""
    b = Base(base)
    if ell == 0:
        raise DomainError("ell must be nonzero")
    r, D = _prefix_points(N_max, b)
    ang = _phases(ell, r, D)
    return np.cumsum(np.cos(ang)) + 1j * np.cumsum(np.sin(ang))


def fourier_coeff_delta(profile: DiscrepancyProfile, ell: int) -> complex:
    """int_0^1 Delta_N(x) e^(-2 pi i ell x) dx, one linear piece at a time.

    On a piece where Delta_N = u(x) = j - N x an antiderivative is
    e^(-i w x) (u(x) i / w - N / w^2) with w = 2 pi ell.
    """
    if ell == 0:
        raise DomainError("ell must be nonzero")
    D, N = profile.denominator, profile.N
    lo = profile.ys
    hi = np.append(lo[1:], D)
    j = np.arange(1, N + 1, dtype=np.int64)
    w = TWO_PI * ell
    u_lo = (j * D - N * lo) / D
    u_hi = (j * D - N * hi) / D
    e_lo = np.exp(-1j * _phases(ell, lo, D))
    e_hi = np.exp(-1j * _phases(ell, hi, D))
    g_hi = e_hi * (u_hi * (1j / w) - N / w**2)
    g_lo = e_lo * (u_lo * (1j / w) - N / w**2)
    parts = np.concatenate([g_hi, -g_lo])
    return complex(math.fsum(parts.real.tolist()), math.fsum(parts.imag.tolist()))


def fourier_coeff_from_sum(N: int, ell: int, base) -> complex:
    """(1 / (2 pi i ell)) sum_{n<N} e^(-2 pi i ell x_n)."""
    return exp_sum(-ell, N, base).value / (2j * math.pi * ell)


# -- integrands ------------------------------------------------------------


def _poly_eval(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_deriv(coeffs):
    return [k * c for k, c in enumerate(coeffs)][1:]


def _poly_antideriv(coeffs):
    return [Fraction(0)] + [c / (k + 1) for k, c in enumerate(coeffs)]


def _roots_in_unit(coeffs) -> list:
    """Sign-change candidates of a polynomial inside (0, 1); exact when linear."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if len(coeffs) <= 1:
        return []
    if len(coeffs) == 2:
        t = Fraction(-coeffs[0]) / coeffs[1]
        return [t] if 0 < t < 1 else []
    found = np.roots([float(c) for c in reversed(coeffs)])
    return sorted(float(z.real) for z in found if abs(z.imag) < 1e-12 and 0 < z.real < 1)


def _abs_integral(f_coeffs, F_coeffs):
    """int_0^1 |f| for a polynomial f with antiderivative F."""
    pts = [0] + _roots_in_unit(f_coeffs) + [1]
    vals = [_poly_eval(F_coeffs, t) for t in pts]
    return sum(abs(b - a) for a, b in zip(vals, vals[1:]))


class Integrand:
    """Twice differentiable f on [0, 1] with closed forms for the quantities
    the decomposition needs. ``exact`` integrands return rationals."""

    exact = False
    spec = ""

    def values(self, r: np.ndarray, D: int) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self):
        return f"<Integrand {self.spec}>"


class Polynomial(Integrand):
    exact = True

    def __init__(self, coeffs):
        if not coeffs:
            raise DomainError("polynomial needs at least one coefficient")
        self.coeffs = [Fraction(c) for c in coeffs]
        self.spec = "poly:" + ",".join(str(c) for c in self.coeffs)
        d1 = _poly_deriv(self.coeffs)
        d2 = _poly_deriv(d1)
        self.integral = _poly_eval(_poly_antideriv(self.coeffs), 1)
        self.f0 = self.coeffs[0]
        self.f1 = sum(self.coeffs)
        self.second_l1 = _abs_integral(d2, d1) if d2 else Fraction(0)
        self.variation = _abs_integral(d1, self.coeffs) if d1 else Fraction(0)

    def __call__(self, x):
        return _poly_eval(self.coeffs, x)

    def exact_sum(self, r: list[int], D: int) -> Fraction:
        # sum_n p(r_n / D) = sum_k c_k (sum_n r_n^k) / D^k
        total = Fraction(0)
        for k, c in enumerate(self.coeffs):
            if c:
                total += c * Fraction(sum(x**k for x in r), D**k)
        return total

    def values(self, r, D):
        return np.array([float(self(Fraction(int(x), D))) for x in r])


class Trig(Integrand):
    def __init__(self, kind: str, k: int, amp):
        if kind not in ("sin", "cos"):
            raise DomainError("trig kind must be sin or cos")
        if int(k) != k or k < 0:
            raise DomainError("trig frequency must be a nonnegative integer")
        self.kind, self.k, self.amp = kind, int(k), float(amp)
        self.spec = f"trig:{kind},{self.k},{amp}"
        a = abs(self.amp)
        if self.k == 0:
            self.integral = self.amp if kind == "cos" else 0.0
            self.second_l1 = 0.0
            self.variation = 0.0
        else:
            self.integral = 0.0
            self.second_l1 = 8 * math.pi * self.k**2 * a
            self.variation = 4 * self.k * a
        self.f0 = self.f1 = self.amp if kind == "cos" else 0.0

    def __call__(self, x):
        g = math.sin if self.kind == "sin" else math.cos
        return self.amp * g(TWO_PI * self.k * float(x))

    def values(self, r, D):
        ang = _phases(self.k, np.asarray(r, dtype=np.int64), D)
        return self.amp * (np.sin(ang) if self.kind == "sin" else np.cos(ang))


class Exponential(Integrand):
    def __init__(self, a):
        self.a = float(a)
        self.spec = f"exp:{a}"
        a = self.a
        self.integral = math.expm1(a) / a if a else 1.0
        self.f0 = 1.0
        self.f1 = math.exp(a)
        self.second_l1 = a * math.expm1(a)
        self.variation = abs(math.expm1(a))

    def __call__(self, x):
        return math.exp(self.a * float(x))

    def values(self, r, D):
        return np.exp(self.a * (np.asarray(r, dtype=np.float64) / D))


def parse_integrand(spec: str) -> Integrand:
    """Parse ``poly:c0,c1,...``, ``trig:sin|cos,k,amp`` or ``exp:a``."""
    kind, _, rest = spec.partition(":")
    args = [s.strip() for s in rest.split(",")] if rest else []
    f = None
    try:
        if kind == "poly" and args:
            f = Polynomial([Fraction(a) for a in args])
        elif kind == "trig" and len(args) == 3:
            f = Trig(args[0], int(args[1]), float(Fraction(args[2])))
        elif kind == "exp" and len(args) == 1:
            f = Exponential(float(Fraction(args[0])))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad integrand {spec!r}: {exc}") from None
    if f is None:
        raise DomainError(f"unknown integrand descriptor {spec!r}")
    f.spec = spec
    return f


@dataclass(frozen=True)
class QmcDecomposition:
    N: int
    base: int
    f_id: str
    sum_f: Fraction | float
    mean_term: Fraction | float
    jump_term: Fraction | float
    remainder: Fraction | float
    bound: Fraction | float

    @property
    def satisfied(self) -> bool:
        if isinstance(self.remainder, Fraction) and isinstance(self.bound, Fraction):
            return abs(self.remainder) <= self.bound
        return abs(self.remainder) <= self.bound * (1 + 1e-12) + 1e-12


def _as_integrand(f) -> Integrand:
    return parse_integrand(f) if isinstance(f, str) else f


def _decompose(f: Integrand, N, b, sum_f, s) -> QmcDecomposition:
    mean_term = N * f.integral
    jump_term = (f.f1 - f.f0) * (s if f.exact else float(s))
    remainder = sum_f - mean_term + jump_term
    bound = Fraction(b, 3) * f.second_l1 if isinstance(f.second_l1, Fraction) else b / 3 * f.second_l1
    out = QmcDecomposition(N, int(b), f.spec, sum_f, mean_term, jump_term, remainder, bound)
    if not out.satisfied:
        raise InvariantError(f"QMC remainder {float(remainder)} exceeds {float(bound)} at N={N}")
    return out


def qmc_sweep(f, N_max: int, base):
    """QmcDecomposition for every N = 1..N_max, from running sums."""
    f = _as_integrand(f)
    b = Base(base)
    r, D = _prefix_points(N_max, b)
    if f.exact:
        terms = [f(Fraction(x, D)) for x in r.tolist()]
        run = Fraction(0)
        for N, t in enumerate(terms, start=1):
            run += t
            yield _decompose(f, N, b, run, s_of_n(N, b))
    else:
        sums = np.cumsum(f.values(r, D)).tolist()
        for N, total in enumerate(sums, start=1):
            yield _decompose(f, N, b, total, s_of_n(N, b))


def qmc_decompose(f, N: int, base) -> QmcDecomposition:
    f = _as_integrand(f)
    b = Base(base)
    N = check_index(N, "N")
    if N < 1:
        raise DomainError("N must be >= 1")
    r, D = _prefix_points(N, b)
    if f.exact:
        total = f.exact_sum(r.tolist(), D)
    else:
        total = math.fsum(f.values(r, D).tolist())
    return _decompose(f, N, b, total, s_of_n(N, b))


@dataclass(frozen=True)
class KoksmaReport:
    N: int
    base: int
    f_id: str
    gap: float
    envelope: float

    @property
    def satisfied(self) -> bool:
        return self.gap <= self.envelope * (1 + 1e-12) + 1e-12


def koksma_gap(f, N: int, base) -> KoksmaReport:
    """|sum f(x_n) - N int f| against ((b/4) log_b N + b) V(f)."""
    f = _as_integrand(f)
    b = Base(base)
    d = qmc_decompose(f, N, b)
    gap = abs(d.sum_f - d.mean_term)
    env = (b / 4 * (math.log(N) / math.log(b)) + b) * float(f.variation)
    return KoksmaReport(N, int(b), f.spec, float(gap), env)
