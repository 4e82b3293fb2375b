"""Exact discrepancy statistics of the base-b van der Corput sequence."""

from .digit_formula import (
    brute_moments,
    check_prop8_moment_bound,
    expected_s,
    moment_constants,
    s_of_n,
    s_of_n_digits,
    standard_family_for_s,
    variance_drift,
)
from .discrepancy import build_profile, eval_delta, integral_delta, integral_delta_against_poly, s_of_n_direct
from .errors import DomainError, InvariantError, ResourceCapError
from .harmonic import exp_sum, fourier_coeff_delta, koksma_gap, parse_integrand, qmc_decompose
from .limit_stats import clt_scan, lp_tail_scan, phi, scan_s, tail_scan
from .norms import lp_norm, sup_norm
from .radix_core import Base, DigitVec, digits_of, radical_inverse, sequence_prefix

__version__ = "0.1.0"
