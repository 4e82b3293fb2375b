"""Acceptance suite. Each test prints one PASS/FAIL line, then asserts."""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from vdcorput.cli import main
from vdcorput.digit_formula import (
    brute_mean,
    brute_moments,
    check_prop8_moment_bound,
    expected_s,
    moment_constants,
    s_of_n,
    s_of_n_digits,
    s_of_n_literal,
    standard_family_for_s,
    standard_family_identity_holds,
)
from vdcorput.discrepancy import build_profile, integral_delta, integral_delta_against_poly, s_of_n_direct
from vdcorput.harmonic import (
    b_adic_valuation,
    exp_sum_prefixes,
    fourier_coeff_delta,
    fourier_coeff_from_sum,
    parse_integrand,
    qmc_decompose,
    qmc_sweep,
)
from vdcorput.limit_stats import clt_scan, default_grid, s_values, scan_denominator, tail_scan
from vdcorput.norms import lp_norm, lp_norm_closed_form, sup_norm
from vdcorput.radix_core import digits_of

# exact variances of S(N), N uniform on [0, b^m), m = 1, 2, ... (first verified run)
VARIANCES = {
    2: ["1/16", "19/256", "75/1024", "291/4096", "1155/16384", "4707/65536", "19555/262144",
        "82147/1048576", "346851/4194304", "1466595/16777216", "6197475/67108864", "26147043/268435456"],
    3: ["13/162", "61/729", "1103/13122", "5290/59049", "104945/1062882", "524743/4782969",
        "10460147/86093442", "51768340/387420489"],
}


@pytest.fixture
def report(capsys):
    def emit(num, ok, detail, started):
        with capsys.disabled():
            print(f"\ncriterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{time.perf_counter() - started:.1f}s]")
    return emit


def test_c01_digit_formula_equivalence(report):
    t0 = time.perf_counter()
    bad = 0
    for b in (2, 3, 5, 7, 10):
        for N in range(0, 4097):
            if s_of_n_digits(digits_of(N, b)) != s_of_n_direct(N, b):
                bad += 1
    rng = random.Random(2024)
    for _ in range(100):
        N = 2**50 + rng.randrange(-(2**44), 2**44)
        b = rng.choice([2, 3, 5, 7, 10])
        d = digits_of(N, b)
        if s_of_n_digits(d) != s_of_n_literal(d):
            bad += 1
    ok = bad == 0
    report(1, ok, f"mismatches={bad} over 5x4097 small N and 100 N near 2^50", t0)
    assert ok


def test_c02_integral_equals_s(report):
    t0 = time.perf_counter()
    bad = 0
    for b in (2, 3, 5):
        for N in range(1, 2049):
            if integral_delta(build_profile(N, b)) != s_of_n_direct(N, b):
                bad += 1
    ok = bad == 0
    report(2, ok, f"mismatches={bad} over N<=2048, b in 2,3,5", t0)
    assert ok


def test_c03_mean_formula(report):
    t0 = time.perf_counter()
    checked = bad = 0
    for b in (2, 3, 5):
        c = moment_constants(b).c_b
        for m in range(1, 9):
            if b**m > 10**6:
                continue
            closed = Fraction((b * b - 1) * m, 12 * b) + Fraction(1, 4) - Fraction(1, 4 * b**m)
            mean = brute_mean(b, m)
            checked += 1
            if mean != closed or closed != expected_s(b, m) or abs(mean - c * m) > Fraction(1, 4):
                bad += 1
    ok = bad == 0
    report(3, ok, f"{checked} (b, m) pairs, mismatches={bad}", t0)
    assert ok


def test_c04_variance_increments(report):
    t0 = time.perf_counter()
    failures = []
    for b, m_max in ((2, 12), (3, 8)):
        d = moment_constants(b).d_b
        var = [brute_moments(b, m, 2)[1] for m in range(1, m_max + 1)]
        assert var == [Fraction(v) for v in VARIANCES[b]]
        # err[i] = |Var_{m+1} - Var_m - d| with m = i + 1
        err = [abs(var[i + 1] - var[i] - d) for i in range(m_max - 1)]
        for i in range(2, len(err) - 1):
            if err[i + 1] * 2 > err[i]:
                failures.append(f"b={b} m={i + 1}->{i + 2} ratio={float(err[i] / err[i + 1]):.3f}")
        if err[-1] >= Fraction(1, 1000):
            failures.append(f"b={b} last={float(err[-1]):.4e}")
    ok = not failures
    shown = "; ".join(failures[:3]) + (f"; +{len(failures) - 3} more" if len(failures) > 3 else "")
    report(4, ok, "halving and final < 1e-3" if ok else shown, t0)
    assert ok, "; ".join(failures)


def test_c05_l2_remainder(report):
    t0 = time.perf_counter()
    bad = 0
    worst = 0.0
    for b in (2, 3, 5):
        for N in range(1, 4097):
            prof = build_profile(N, b)
            lhs = integral_delta_against_poly(prof, s_of_n(N, b), 2)
            rhs = b * b / 12 * (math.log(N) / math.log(b) + 1)
            worst = max(worst, float(lhs) / rhs)
            if float(lhs) > rhs:
                bad += 1
    ok = bad == 0
    report(5, ok, f"violations={bad}, max lhs/rhs={worst:.4f}", t0)
    assert ok


def test_c06_exp_sum_bound(report):
    t0 = time.perf_counter()
    bad = 0
    worst = 0.0
    for b in (2, 3):
        for ell in range(-50, 51):
            if ell == 0:
                continue
            bound = b ** (b_adic_valuation(ell, b) + 1)
            sums = np.abs(exp_sum_prefixes(ell, 2048, b))
            worst = max(worst, float(sums.max()) / bound)
            bad += int(np.count_nonzero(sums >= bound + 1e-9))
    ok = bad == 0
    report(6, ok, f"violations={bad}, max |sum|/bound={worst:.6f}", t0)
    assert ok


def test_c07_fourier_identity(report):
    t0 = time.perf_counter()
    rng = random.Random(0)
    worst = 0.0
    for _ in range(50):
        b = rng.choice([2, 3, 5])
        N = rng.randint(1, 1024)
        ell = rng.choice([-1, 1]) * rng.randint(1, 40)
        res = abs(fourier_coeff_delta(build_profile(N, b), ell) - fourier_coeff_from_sum(N, ell, b))
        worst = max(worst, res)
    ok = worst < 1e-10
    report(7, ok, f"max residual={worst:.3e} over 50 seeded triples", t0)
    assert ok


def test_c08_qmc_remainder(report):
    t0 = time.perf_counter()
    bad = 0
    worst = 0.0
    for spec in ("poly:0,0,1", "trig:sin,1,1", "exp:1"):
        f = parse_integrand(spec)
        for b in (2, 3, 5):
            for d in qmc_sweep_checked(f, b):
                worst = max(worst, float(abs(d.remainder)) / float(d.bound))
                if not d.satisfied:
                    bad += 1
    hand = qmc_decompose(parse_integrand("poly:0,0,1"), 4, 2).remainder
    ok = bad == 0 and hand == Fraction(1, 24)
    report(8, ok, f"violations={bad}, max |rem|/bound={worst:.4f}, hand case={hand}", t0)
    assert ok


def qmc_sweep_checked(f, b):
    # qmc_sweep raises on a violated bound; surface that as a record instead
    from vdcorput.errors import InvariantError
    try:
        yield from qmc_sweep(f, 4096, b)
    except InvariantError:
        yield type("Bad", (), {"remainder": float("inf"), "bound": 1.0, "satisfied": False})()


def test_c09_moment_bound(report):
    t0 = time.perf_counter()
    bad = []
    for b in (2, 3):
        for m in range(3, 7):
            if not standard_family_identity_holds(b, m):
                bad.append(f"identity b={b} m={m}")
            fam = standard_family_for_s(b, m)
            for k in (1, 2):
                rep = check_prop8_moment_bound(fam, b, k)
                if not rep.satisfied:
                    bad.append(f"bound b={b} m={m} k={k}")
    ok = not bad
    report(9, ok, "identity and bound hold for b in 2,3, m in 3..6, k in 1,2" if ok else ", ".join(bad), t0)
    assert ok


def test_c10_clt_trend(report):
    t0 = time.perf_counter()
    grid = default_grid()
    small = clt_scan(2**12, 2, grid, mode="fast")
    large = clt_scan(2**22, 2, grid, mode="fast", threads=4)
    envelope = (math.log(math.log2(2**22)) / 22) ** 0.25
    ok = large.ks_distance < small.ks_distance and large.ks_distance < envelope
    report(10, ok, f"ks(2^12)={small.ks_distance:.4f}, ks(2^22)={large.ks_distance:.4f}, envelope={envelope:.4f}", t0)
    assert ok


def test_c11_large_deviations(report):
    t0 = time.perf_counter()
    runs = [(2, 2**16), (2, 2**20), (3, 3**16)]
    bad = []
    worst = 0.0
    for b, M in runs:
        for lam in (3, 5, 9, 16, 25):
            rep = tail_scan(M, b, lam, threads=4)
            if not rep.satisfied:
                bad.append(f"b={b} M={M} lam={lam}")
            if lam == 3:
                worst = max(worst, rep.max_deviation / rep.threshold)
                if rep.max_deviation >= rep.threshold:
                    bad.append(f"envelope b={b} M={M}")
    ok = not bad
    report(11, ok, f"{len(runs) * 5} runs satisfied, max|S - c log_b M| / threshold(3)={worst:.4f}"
           if ok else ", ".join(bad), t0)
    assert ok


def test_c12_norm_chain(report):
    t0 = time.perf_counter()
    chain_bad = 0
    worst_rel = 0.0
    for b in (2, 3, 5):
        for N in range(1, 1025):
            prof = build_profile(N, b)
            s = float(s_of_n(N, b))
            vals = [s] + [lp_norm(prof, p).value for p in (1, 2, 4, 8)] + [sup_norm(prof)]
            if abs(vals[0] - vals[1]) > 1e-9 or any(x > y + 1e-9 for x, y in zip(vals[1:], vals[2:])):
                chain_bad += 1
            for p in (2, 4, 6, 8):
                a = lp_norm(prof, p).value
                c = lp_norm_closed_form(prof, p).value
                worst_rel = max(worst_rel, abs(a - c) / a)
    ok = chain_bad == 0 and worst_rel <= 1e-10
    report(12, ok, f"chain violations={chain_bad}, max exact/closed-form rel diff={worst_rel:.2e}", t0)
    assert ok


def _scan_cli(tmp_path, mode, threads, M=2**20):
    out = tmp_path / f"scan_{mode}_{threads}.csv"
    assert main(["scan", "--base", "2", "--m", str(M), "--mode", mode, "--threads", str(threads),
                 "--out", str(out)]) == 0
    return out.read_bytes()


def test_c13_determinism(report, tmp_path):
    t0 = time.perf_counter()
    e1 = _scan_cli(tmp_path, "exact", 1)
    e4 = _scan_cli(tmp_path, "exact", 4)
    f1 = _scan_cli(tmp_path, "fast", 1)
    f4 = _scan_cli(tmp_path, "fast", 4)

    def column(text):
        return np.array([float(row.split(",")[1]) for row in text.decode().splitlines()[1:]])

    a, c = column(f1), column(f4)
    rel_threads = float(np.max(np.abs(a - c) / np.maximum(np.abs(a), 1e-300)))
    M = 2**20
    exact = s_values(M, 2) / scan_denominator(M, 2)
    nz = exact != 0
    rel_exact = float(np.max(np.abs(a[nz] - exact[nz]) / np.abs(exact[nz])))
    ok = e1 == e4 and rel_threads <= 1e-12 and rel_exact <= 1e-12
    report(13, ok, f"exact byte-identical={e1 == e4}, fast rel diff threads={rel_threads:.1e}, "
           f"fast vs exact={rel_exact:.1e}", t0)
    assert ok
