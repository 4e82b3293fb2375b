"""Scans of S(N) and ||Delta_N||_p over 0 <= N < M.

A scan is split into contiguous chunks of N. Each chunk starts from the digit
formula for S at its first index and then accumulates
S(N + 1) = S(N) + 1/2 - x_N. Exact mode carries the integer
A_N = 2 b^m S(N) (m = ceil(log_b M)); fast mode carries doubles with a
compensated prefix sum.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .digit_formula import _scaled_s, moment_constants
from .errors import DomainError, ResourceCapError
from .norms import P_MAX
from .radix_core import Base, levels_for, radical_inverse_array

EXACT_CAP = 2**26
FAST_CAP = 2**32
LP_CAP = 2**16
CHUNK = 2**20


def phi(lam: float) -> float:
    """Standard normal distribution function."""
    return 0.5 * math.erfc(-lam / math.sqrt(2.0))


def default_grid() -> list[float]:
    return [-4.0 + 0.25 * k for k in range(33)]


def theory_envelope(M: int, base) -> float:
    """(log log_b M / log_b M)^(1/4)."""
    L = math.log(M) / math.log(base)
    return (math.log(L) / L) ** 0.25


def log_base(N, b: int):
    return np.log(N) / math.log(b)


@dataclass(frozen=True)
class ScanRecord:
    N: int
    s_value: Fraction | float
    normalized: float | None
    lp_value: float | None = None


def _check_scan(M: int, b: int, mode: str) -> None:
    if mode not in ("exact", "fast"):
        raise DomainError("mode must be 'exact' or 'fast'")
    if M <= b:
        raise DomainError("M must exceed the base")
    cap = EXACT_CAP if mode == "exact" else FAST_CAP
    if M > cap:
        raise ResourceCapError(f"M={M} exceeds the {mode} scan cap {cap}")


def _twosum_prefix(start: float, terms: np.ndarray) -> np.ndarray:
    """Compensated prefix sums: out[k] = start + sum(terms[:k])."""
    seq = np.empty(terms.size + 1)
    seq[0] = start
    seq[1:] = terms
    s = np.cumsum(seq)
    a = s[:-1]
    t = seq[1:]
    cur = s[1:]
    tp = cur - a
    ap = cur - tp
    err = np.zeros_like(s)
    err[1:] = (a - ap) + (t - tp)
    return s + np.cumsum(err)


def _chunk(lo: int, hi: int, b: int, m: int, mode: str) -> np.ndarray:
    D = b**m
    powers = [b**k for k in range(m + 1)]
    start = _scaled_s(lo, b, m, powers)  # 2 D S(lo)
    r = radical_inverse_array(lo, hi - 1, b, m)
    if mode == "exact":
        out = np.empty(hi - lo, dtype=np.int64)
        out[0] = start
        np.cumsum(D - 2 * r, out=out[1:])
        out[1:] += start
        return out
    terms = 0.5 - r.astype(np.float64) / D
    return _twosum_prefix(start / (2 * D), terms)


def scan_chunks(M: int, base, mode: str = "exact", threads: int = 1, chunk: int = CHUNK
                ) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (first N, values) over 0 <= N < M in increasing order.

    Values are A_N = 2 b^m S(N) as int64 in exact mode and S(N) as float64 in
    fast mode. Results do not depend on ``threads``; exact values do not
    depend on ``chunk`` either.
    """
    b = Base(base)
    M = int(M)
    _check_scan(M, b, mode)
    m = levels_for(M, b)
    D = b**m
    if mode == "exact" and 2 * D * (b * m // 4 + b + 2) >= 2**62:
        raise ResourceCapError("exact accumulator would not fit in 64 bits")
    bounds = [(lo, min(lo + chunk, M)) for lo in range(0, M, chunk)]
    threads = max(1, int(threads))
    if threads == 1:
        for lo, hi in bounds:
            yield lo, _chunk(lo, hi, b, m, mode)
        return
    with ThreadPoolExecutor(threads) as pool:
        for i in range(0, len(bounds), threads):
            batch = bounds[i:i + threads]
            results = pool.map(lambda lh: _chunk(lh[0], lh[1], b, m, mode), batch)
            for (lo, _), values in zip(batch, results):
                yield lo, values


def scan_denominator(M: int, base) -> int:
    """2 b^m, the denominator of exact-mode scan values."""
    return 2 * int(base) ** levels_for(M, int(base))


def normalized_statistic(values: np.ndarray, Ns: np.ndarray, base) -> np.ndarray:
    """(v - c(b) log_b N) / sqrt(d(b) log_b N); NaN where N < 2."""
    const = moment_constants(base)
    c, d = float(const.c_b), float(const.d_b)
    out = np.full(values.shape, np.nan)
    ok = Ns >= 2
    L = log_base(Ns[ok].astype(np.float64), base)
    out[ok] = (values[ok] - c * L) / np.sqrt(d * L)
    return out


def scan_s(M: int, base, mode: str = "exact", threads: int = 1) -> Iterator[ScanRecord]:
    """Stream ScanRecord rows for N = 0, 1, ..., M - 1."""
    b = Base(base)
    den = scan_denominator(M, b)
    for lo, values in scan_chunks(M, b, mode, threads):
        Ns = np.arange(lo, lo + values.size)
        floats = values / den if mode == "exact" else values
        z = normalized_statistic(floats, Ns, b)
        for N, v, zz in zip(Ns.tolist(), values.tolist(), z.tolist()):
            s = Fraction(v, den) if mode == "exact" else v
            yield ScanRecord(N, s, None if N < 2 else zz)


def s_values(M: int, base, mode: str = "exact", threads: int = 1) -> np.ndarray:
    """All S(N), N < M, as one array (scaled ints in exact mode)."""
    return np.concatenate([v for _, v in scan_chunks(M, base, mode, threads)])


def _power_integral_scan(yf: np.ndarray, N: int, q: float, j: np.ndarray) -> float:
    """int |Delta_N|^(q-1) from sorted breakpoints yf = y/D in double precision.

    With w_j = j - N y_j the right limit at y_j, the left limit at y_{j+1} is
    w_{j+1} - 1, so one array of N values covers every segment.
    """
    w = j[:N] - N * yf
    total = np.sum(np.abs(w) ** q)
    w -= 1.0
    total -= np.sum(np.abs(w[1:]) ** q)
    return float(total) / (N * q)


def lp_values(M: int, base, p: float, start: int = 2) -> np.ndarray:
    """||Delta_N||_p for start <= N < M by incremental sorted insertion."""
    b = Base(base)
    p = float(p)
    if not 1 <= p <= P_MAX:
        raise DomainError("p must lie in [1, 64]")
    if M > LP_CAP:
        raise ResourceCapError(f"M={M} exceeds the L^p scan cap {LP_CAP}")
    m = levels_for(M, b)
    r = radical_inverse_array(0, M, b, m) / float(b**m)
    j = np.arange(1, M + 1, dtype=np.float64)
    out = np.empty(max(M - start, 0))
    ys = np.sort(r[:start])
    for N in range(start, M):
        if N > start:
            y = r[N - 1]
            ys = np.insert(ys, np.searchsorted(ys, y), y)
        out[N - start] = _power_integral_scan(ys, N, p + 1.0, j) ** (1.0 / p)
    return out


@dataclass(frozen=True)
class CltReport:
    M: int
    base: int
    lambda_grid: list[float]
    empirical: list[float]
    phi: list[float]
    ks_distance: float
    theory_envelope: float
    statistic: str = "s"


def _statistic_chunks(M, b, statistic, p, mode, threads):
    if statistic == "s":
        den = scan_denominator(M, b)
        for lo, values in scan_chunks(M, b, mode, threads):
            yield lo, (values / den if mode == "exact" else values)
    elif statistic == "lp":
        if p is None:
            raise DomainError("lp statistic needs p")
        yield 2, lp_values(M, b, p)
    else:
        raise DomainError("statistic must be 's' or 'lp'")


def clt_scan(M: int, base, lambda_grid: Sequence[float] | None = None, statistic: str = "s",
             p: float | None = None, mode: str = "fast", threads: int = 1) -> CltReport:
    """Frequencies of the normalized statistic below each lambda, N in [2, M)."""
    b = Base(base)
    M = int(M)
    if M <= b * b:
        raise DomainError("M must exceed b^2")
    grid = np.asarray(default_grid() if lambda_grid is None else list(lambda_grid), dtype=float)
    if np.any(np.diff(grid) < 0):
        raise DomainError("lambda grid must be sorted")
    counts = np.zeros(grid.size, dtype=np.int64)
    for lo, values in _statistic_chunks(M, b, statistic, p, mode, threads):
        Ns = np.arange(lo, lo + values.size)
        z = normalized_statistic(values, Ns, b)
        z = np.sort(z[Ns >= 2])
        counts += np.searchsorted(z, grid, side="left")
    total = M - 2
    empirical = (counts / total).tolist()
    phis = [phi(x) for x in grid.tolist()]
    ks = max(abs(e - f) for e, f in zip(empirical, phis))
    name = "s" if statistic == "s" else f"lp({p:g})"
    return CltReport(M, int(b), grid.tolist(), empirical, phis, ks, theory_envelope(M, b), name)


@dataclass(frozen=True)
class TailReport:
    M: int
    base: int
    lam: float
    threshold: float
    empirical_fraction: float
    bound: float
    satisfied: bool
    max_deviation: float = math.nan


def large_deviation_bound(M: int, base, lam: float) -> float:
    """4 sqrt(lam) / (e^(sqrt(lam) - 1) - 2) + b^-(sqrt(log_b M) - 2)."""
    L = math.log(M) / math.log(base)
    root = math.sqrt(lam)
    return 4 * root / (math.exp(root - 1) - 2) + float(base) ** -(math.sqrt(L) - 2)


def tail_scan(M: int, base, lam: float, mode: str = "exact", threads: int = 1) -> TailReport:
    """Fraction of 0 <= N < M with |S(N) - c(b) log_b M| >= 25 lam b sqrt(log_b M + 1)."""
    b = Base(base)
    M = int(M)
    if lam < 3:
        raise DomainError("lambda must be >= 3")
    L = math.log(M) / math.log(b)
    center = float(moment_constants(b).c_b) * L
    threshold = 25 * lam * b * math.sqrt(L + 1)
    hits = 0
    worst = 0.0
    for _, values in _statistic_chunks(M, b, "s", None, mode, threads):
        dev = np.abs(values - center)
        hits += int(np.count_nonzero(dev >= threshold))
        worst = max(worst, float(dev.max()))
    frac = hits / M
    bound = large_deviation_bound(M, b, lam)
    return TailReport(M, int(b), float(lam), threshold, frac, bound, frac <= min(1.0, bound), worst)


@dataclass(frozen=True)
class LpTailReport:
    M: int
    base: int
    lam: float
    threshold: float  # A lam b; the cut for N is threshold * sqrt(log_b N)
    empirical_fraction: float
    bound: float
    satisfied: bool
    p: float
    A: float


def lp_tail_scan(M: int, base, p: float, lam: float, A: float) -> LpTailReport:
    """Fraction of 2 <= N < M with | ||Delta_N||_p - c(b) log_b N | >= A lam b sqrt(log_b N)."""
    b = Base(base)
    M = int(M)
    if M <= b:
        raise DomainError("M must exceed the base")
    if lam < 1:
        raise DomainError("lambda must be >= 1")
    if A <= 0:
        raise DomainError("A must be positive")
    values = lp_values(M, b, p)
    L = log_base(np.arange(2, M, dtype=np.float64), b)
    c = float(moment_constants(b).c_b)
    coef = A * lam * b
    hits = int(np.count_nonzero(np.abs(values - c * L) >= coef * np.sqrt(L)))
    frac = hits / (M - 2)
    bound = math.exp(-math.sqrt(lam))
    return LpTailReport(M, int(b), float(lam), coef, frac, bound, frac <= bound, float(p), float(A))


def fmt(x: float) -> float:
    """Round to 15 significant digits for serialization."""
    return float(f"{x:.15g}")


def clt_report_csv(report: CltReport) -> str:
    lines = ["lambda,empirical,phi,abs_diff"]
    for lam, e, f in zip(report.lambda_grid, report.empirical, report.phi):
        lines.append(f"{lam:.15g},{e:.15g},{f:.15g},{abs(e - f):.15g}")
    return "\n".join(lines) + "\n"


def clt_report_json(report: CltReport) -> str:
    rows = [
        {"lambda": fmt(lam), "empirical": fmt(e), "phi": fmt(f), "abs_diff": fmt(abs(e - f))}
        for lam, e, f in zip(report.lambda_grid, report.empirical, report.phi)
    ]
    return json.dumps({
        "M": report.M, "base": report.base, "statistic": report.statistic,
        "ks_distance": fmt(report.ks_distance), "theory_envelope": fmt(report.theory_envelope),
        "rows": rows,
    }, separators=(",", ":"))


def tail_report_json(report: TailReport | LpTailReport) -> str:
    out = {
        "M": report.M,
        "base": report.base,
        "lambda": fmt(report.lam),
        "threshold": fmt(report.threshold),
        "empirical_fraction": fmt(report.empirical_fraction),
        "bound": fmt(report.bound),
        "satisfied": bool(report.satisfied),
    }
    if isinstance(report, LpTailReport):
        out["p"] = fmt(report.p)
        out["A"] = fmt(report.A)
    return json.dumps(out, separators=(",", ":"))
