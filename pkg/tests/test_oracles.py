"""Sanity checks on the reference implementations themselves."""
from fractions import Fraction
from math import factorial

import mpmath
import pytest

import oracles


@pytest.mark.parametrize("z", ["-3", "-0.5", "0.1", "1", "2"])
def test_erfc_series_matches_mpmath(z):
    ref = mpmath.erfc(mpmath.mpf(z))
    assert abs(oracles.erfc_series(z) - ref) < mpmath.mpf(10) ** -100 * max(1, abs(ref))


def test_ml_half_agrees_with_brute_force():
    for z in ("-2", "-0.5", "1.5"):
        a = oracles.ml_half(mpmath.mpf(z))
        b = oracles.ml_direct("0.5", z)
        assert abs(a - b) < mpmath.mpf(10) ** -90 * abs(a)


def test_gamma_integral_matches_mpmath():
    for a in ("0.7", "1.5", "3.25"):
        assert abs(oracles.gamma_by_integral(a) - oracles.gamma_oracle(a)) < mpmath.mpf(10) ** -30


def test_stirling_enumeration_matches_recurrence():
    s = oracles.stirling2_recurrence(8)
    for m in range(9):
        for l in range(m + 1):
            assert oracles.stirling2_enumerate(m, l) == s[m][l]


def test_pascal_row():
    assert oracles.pascal_row(5) == [1, 5, 10, 10, 5, 1]
    assert oracles.pascal_row(30)[15] == 155117520


def test_egf_power_against_binomial_expansion():
    # (e^s - 1)^l = sum_n (-1)^(l-n) C(l, n) e^(ns)
    for l in range(5):
        coeffs = oracles.egf_power_coeffs(l, 9)
        for m in range(10):
            direct = sum((-1) ** (l - n) * oracles.binomial_direct(l, n) * n**m for n in range(l + 1))
            assert coeffs[m] == Fraction(direct, factorial(m))


def test_pmf_double_sum_reduces_to_poisson():
    for n in range(6):
        assert abs(oracles.frac_pmf_double_sum(1, "1.5", n, dps=60) - oracles.poisson_pmf("1.5", n, 60)) < mpmath.mpf(10) ** -50


def test_classic_bell_poly_small_orders():
    x = mpmath.mpf(2)
    assert abs(oracles.classic_bell_poly(2, 1) - x) < mpmath.mpf(10) ** -100
    assert abs(oracles.classic_bell_poly(2, 2) - (x + x * x)) < mpmath.mpf(10) ** -100
