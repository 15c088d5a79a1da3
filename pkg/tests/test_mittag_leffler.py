from decimal import Decimal

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import mp
from frackell.errors import DomainError
from frackell.mittag_leffler import (
    MLRequest,
    kernel_block,
    ml_derivative,
    ml_eval,
    mittag_leffler,
    scaled_derivative,
    scaled_derivative_table,
)
from oracles import frac_pmf_double_sum, ml_direct, ml_half

# E_{1/2}(z) = exp(z^2) erfc(-z), evaluated independently
HALF_GOLDEN = {
    "-3": "0.179001151181389950419294815313620987228",
    "-1": "0.4275835761558070044107503444905151808202",
    "-0.5": "0.6156903441929258748707934226837419367823",
    "0.5": "1.95236048918255709327604771344113097989",
    "1": "5.008980080762283466309824598214809814694",
    "2": "108.9409043899779724123554338248132140423",
}


@pytest.mark.parametrize("z,expected", HALF_GOLDEN.items())
def test_half_order_golden(z, expected):
    r = mittag_leffler("0.5", z, target_rel_err="1e-40", precision=45)
    assert abs(mp(r.value) - mpmath.mpf(expected)) / mpmath.mpf(expected) < mpmath.mpf(10) ** -37
    assert abs(mp(r.value) - ml_half(mpmath.mpf(z))) <= mp(r.err_bound)


@pytest.mark.parametrize("z", ["-1", "0.5", "3"])
def test_order_one_is_exp(z):
    r = mittag_leffler(1, z, precision=50)
    assert abs(mp(r.value) - mpmath.exp(mpmath.mpf(z))) <= mp(r.err_bound)


def test_at_zero():
    assert mittag_leffler("0.3", 0).value.value == 1
    assert abs(mp(mittag_leffler("0.5", 0, 1).value) - 2 / mpmath.sqrt(mpmath.pi)) < mpmath.mpf(10) ** -45
    assert mittag_leffler("0.5", 0, 2).value.value == 2


@pytest.mark.parametrize("mu", ["0.25", "0.5", "0.75", "0.9"])
@pytest.mark.parametrize("z", ["-3", "-1.5", "0.7", "2"])
def test_matches_brute_force(mu, z):
    r = ml_eval(MLRequest(mu, z, 0, Decimal("1e-40")), 50)
    ref = ml_direct(mu, z)
    assert abs(mp(r.value) - ref) <= mp(r.err_bound)
    assert abs(mp(r.value) - ref) <= abs(ref) * mpmath.mpf(10) ** -39


@pytest.mark.parametrize("n", [1, 2, 5])
@pytest.mark.parametrize("z", ["-3", "0.5"])
def test_derivatives_match_brute_force(n, z):
    r = ml_derivative(MLRequest("0.6", z, n), 50)
    ref = ml_direct("0.6", z, n=n)
    assert abs(mp(r.value) - ref) <= mp(r.err_bound) + abs(ref) * mpmath.mpf(10) ** -45


def test_large_negative_argument_cancellation():
    # the terms peak near 1e17 while the sum is about 0.03
    r = mittag_leffler("0.5", -40, precision=30)
    # a Maclaurin erfc would cancel just as badly; mpmath's erfc uses the asymptotic side
    ref = mpmath.exp(1600) * mpmath.erfc(40)
    assert abs(mp(r.value) - ref) <= mp(r.err_bound)
    assert r.cancellation_digits > 15


@given(st.decimals(min_value=-6, max_value=3, places=2))
@settings(max_examples=30, deadline=None)
def test_half_order_property(z):
    r = mittag_leffler("0.5", z, precision=30)
    assert abs(mp(r.value) - ml_half(mpmath.mpf(str(z)))) <= mp(r.err_bound)


@given(st.decimals(min_value="0.3", max_value=1, places=2), st.decimals(min_value=0, max_value=3, places=2))
@settings(max_examples=25, deadline=None)
def test_monotone_on_negative_axis(mu, x):
    # completely monotone for 0 < mu <= 1: E_mu(-x) is decreasing and positive
    a = mittag_leffler(mu, -x, precision=25).value
    b = mittag_leffler(mu, -x - Decimal("0.5"), precision=25).value
    assert 0 < b.value < a.value <= 1


def test_request_validation():
    with pytest.raises(DomainError):
        MLRequest("0.5", 1, 201)
    with pytest.raises(DomainError):
        MLRequest("0.5", 1, -1)
    with pytest.raises(DomainError):
        MLRequest("1.5", 1)
    with pytest.raises(DomainError):
        ml_eval(MLRequest("0.5", 1, 1))
    with pytest.raises(DomainError):
        ml_derivative(MLRequest("0.5", 1, 0))


@pytest.mark.parametrize("mu,x", [("0.5", "1"), ("0.25", "3"), ("0.75", "0.3")])
def test_scaled_derivative_matches_literal_double_sum(mu, x):
    for n in (0, 1, 4, 9):
        r = scaled_derivative(mu, x, n, Decimal("1e-40"), 50)
        ref = frac_pmf_double_sum(mu, x, n, dps=200)
        assert abs(mp(r.value) - ref) <= mp(r.err_bound)


def test_table_agrees_with_single_values():
    table = scaled_derivative_table("0.5", "2", 30, Decimal("1e-40"), 50)
    for n in (0, 3, 17, 30):
        single = scaled_derivative("0.5", "2", n, Decimal("1e-40"), 50)
        d = abs(mp(table[n].value) - mp(single.value))
        assert d <= mp(table[n].err_bound) + mp(single.err_bound)


def test_table_relative_accuracy_for_tiny_values():
    table = scaled_derivative_table(1, "0.5", 60, Decimal("1e-40"), 50)
    for n in (40, 60):
        ref = mpmath.exp(-0.5) * mpmath.mpf("0.5") ** n / mpmath.factorial(n)
        assert abs(mp(table[n].value) - ref) / ref < mpmath.mpf(10) ** -39


def test_kernel_block_zero_argument():
    b = kernel_block("0.5", 0, 5, 40)
    assert b.values[0] == 1 and all(v == 0 for v in b.values[1:])
    with pytest.raises(DomainError):
        kernel_block("0.5", -1, 1001, 40)


def test_kernel_block_slices_cached_result():
    big = kernel_block("0.4", "-2.5", 40, 60)
    small = kernel_block("0.4", "-2.5", 10, 60)
    assert small.values == big.values[:11]
