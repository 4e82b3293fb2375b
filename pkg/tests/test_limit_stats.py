import json
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from vdcorput.digit_formula import moment_constants, s_of_n
from vdcorput.discrepancy import build_profile
from vdcorput.errors import DomainError, ResourceCapError
from vdcorput.limit_stats import (
    clt_report_csv,
    clt_scan,
    default_grid,
    large_deviation_bound,
    lp_tail_scan,
    lp_values,
    phi,
    s_values,
    scan_chunks,
    scan_denominator,
    scan_s,
    tail_report_json,
    tail_scan,
    theory_envelope,
)
from vdcorput.norms import lp_norm


def test_phi_examples():
    assert phi(0) == 0.5
    assert phi(1.96) == pytest.approx(0.9750021, abs=5e-8)
    assert 0 < phi(-8) == pytest.approx(6.22e-16, rel=1e-3)


def test_phi_against_mpmath():
    mpmath.mp.dps = 40
    grid = np.linspace(-10, 10, 10_001)
    prev = 0.0
    for x in grid.tolist():
        ref = float(mpmath.ncdf(x))
        v = phi(x)
        assert abs(v - ref) <= 1e-12
        assert abs(phi(-x) - (1 - v)) <= 1e-12
        assert v >= prev
        prev = v


def test_scan_examples():
    assert [r.s_value for r in scan_s(5, 2)] == [0, Fraction(1, 2), Fraction(1, 2), Fraction(3, 4), Fraction(1, 2)]
    assert [r.s_value for r in scan_s(4, 3)] == [0, Fraction(1, 2), Fraction(2, 3), Fraction(1, 2)]
    rec = list(scan_s(10, 2))
    assert rec[0].normalized is None and rec[1].normalized is None
    assert all(math.isfinite(r.normalized) for r in rec[2:])


@pytest.mark.parametrize("b", [2, 3, 7, 10])
def test_scan_matches_digit_formula(b):
    M = 3000
    den = scan_denominator(M, b)
    vals = s_values(M, b)
    assert [Fraction(int(v), den) for v in vals] == [s_of_n(N, b) for N in range(M)]


def test_chunk_and_thread_invariance():
    M, b = 50_000, 3
    ref = s_values(M, b)
    for chunk in (1000, 7919, 2**20):
        for threads in (1, 4):
            got = np.concatenate([v for _, v in scan_chunks(M, b, "exact", threads, chunk)])
            assert np.array_equal(got, ref)
    fast = s_values(M, b, "fast")
    for chunk in (1000, 7919):
        f2 = np.concatenate([v for _, v in scan_chunks(M, b, "fast", 4, chunk)])
        assert np.allclose(f2, fast, rtol=1e-12, atol=0)


def test_fast_vs_exact():
    M = 10**6
    exact = s_values(M, 2) / scan_denominator(M, 2)
    fast = s_values(M, 2, "fast")
    assert np.max(np.abs(fast - exact)) <= M * 2.0**-50


def test_caps():
    with pytest.raises(ResourceCapError):
        next(scan_chunks(2**27, 2, "exact"))
    with pytest.raises(DomainError):
        next(scan_chunks(100, 2, "slow"))


def test_clt_extremes():
    M = 5000
    rep = clt_scan(M, 2, [-10.0, 0.0, 10.0], mode="exact")
    assert rep.empirical[0] <= 3 / M
    assert rep.empirical[2] >= 1 - 3 / M
    assert rep.empirical == sorted(rep.empirical)
    assert rep.ks_distance >= 0


def test_clt_frequency_independent_route():
    M, b = 3000, 3
    c, d = Fraction(3**2 - 1, 12 * 3), moment_constants(3).d_b
    below = 0
    for N in range(2, M):
        L = math.log(N) / math.log(b)
        if (float(s_of_n(N, b)) - float(c) * L) / math.sqrt(float(d) * L) < 0.5:
            below += 1
    assert clt_scan(M, b, [0.5], mode="exact").empirical[0] == below / (M - 2)


def test_clt_midpoint_frozen():
    # centring at c log_b N leaves a positive offset of about 1/4 + c/ln b,
    # which is 1.39 standard deviations at 20 binary digits
    rep = clt_scan(2**20, 2, [0.0])
    assert rep.empirical[0] == pytest.approx(0.10459919853057581, abs=1e-12)
    assert rep.theory_envelope == pytest.approx(theory_envelope(2**20, 2))


def test_clt_domain():
    with pytest.raises(DomainError):
        clt_scan(4, 2)
    with pytest.raises(DomainError):
        clt_scan(100, 2, [1.0, 0.0])


def test_default_grid():
    g = default_grid()
    assert g[0] == -4.0 and g[-1] == 4.0 and len(g) == 33


def test_tail_examples():
    rep = tail_scan(2**20, 2, 3)
    assert rep.empirical_fraction == 0 and rep.satisfied
    assert rep.threshold == pytest.approx(25 * 3 * 2 * math.sqrt(21))
    b16 = large_deviation_bound(2**20, 2, 16)
    assert b16 == pytest.approx(16 / (math.e**3 - 2) + 2 ** -(math.sqrt(20) - 2), rel=1e-12)
    assert large_deviation_bound(2**20, 2, 3) > 1
    with pytest.raises(DomainError):
        tail_scan(100, 2, 2.5)


def test_tail_json_keys():
    text = tail_report_json(tail_scan(1000, 3, 5))
    assert list(json.loads(text)) == ["M", "base", "lambda", "threshold", "empirical_fraction", "bound", "satisfied"]


def test_lp_values_match_profiles():
    vals = lp_values(300, 3, 2.5)
    for N in (2, 17, 299):
        assert vals[N - 2] == pytest.approx(lp_norm(build_profile(N, 3), 2.5).value, rel=1e-12)


def test_lp_tail_examples():
    assert lp_tail_scan(2000, 2, 2, 1, 1000).empirical_fraction == 0
    assert lp_tail_scan(2000, 2, 2, 1, 1e-4).empirical_fraction > 0.95
    rep = lp_tail_scan(2**16, 2, 2, 9, 25)
    assert rep.empirical_fraction <= math.exp(-3) and rep.satisfied
    with pytest.raises(DomainError):
        lp_tail_scan(100, 2, 2, 0.5, 1)


def test_clt_csv_header():
    lines = clt_report_csv(clt_scan(1000, 2, [0.0, 1.0])).splitlines()
    assert lines[0] == "lambda,empirical,phi,abs_diff"
    assert len(lines) == 3


def test_clt_lp_statistic():
    rep = clt_scan(2000, 2, [-1.0, 0.0, 1.0], statistic="lp", p=2)
    assert rep.statistic == "lp(2)"
    assert rep.empirical == sorted(rep.empirical)
