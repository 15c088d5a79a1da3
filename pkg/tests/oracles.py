"""Independent reference computations used by the test-suite.

Nothing in here imports ``frackell``. Everything is evaluated either with
mpmath at generous precision or with exact rational arithmetic.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

import mpmath

ORACLE_DPS = 120


def erfc_series(z, dps: int = ORACLE_DPS):
    """erfc(z) from the Maclaurin series of erf, summed with mpmath reals."""
    with mpmath.workdps(dps + 40):
        z = mpmath.mpf(str(z))
        total = mpmath.mpf(0)
        term = z  # (-1)^n z^(2n+1) / n!
        n = 0
        while True:
            contrib = term / (2 * n + 1)
            total += contrib
            if n > 5 and abs(contrib) < mpmath.mpf(10) ** (-(dps + 30)):
                break
            n += 1
            term = -term * z * z / n
        erf = 2 / mpmath.sqrt(mpmath.pi) * total
        return +(1 - erf)


def ml_half(z, dps: int = ORACLE_DPS):
    """E_{1/2}(z) = exp(z^2) erfc(-z) for real z."""
    with mpmath.workdps(dps):
        return mpmath.exp(mpmath.mpf(z) ** 2) * erfc_series(-z, dps)


def ml_direct(mu, z, dps: int = ORACLE_DPS, n: int = 0):
    """n-th derivative of E_mu at z by brute-force termwise summation in mpmath."""
    with mpmath.workdps(dps):
        mu = mpmath.mpf(str(mu))
        z = mpmath.mpf(str(z))
        total = mpmath.mpf(0)
        k = 0
        small = 0
        while True:
            coeff = Fraction(factorial(k + n), factorial(k))
            zk = z**k if k else mpmath.mpf(1)
            t = mpmath.mpf(coeff.numerator) * zk / mpmath.gamma(mu * (k + n) + 1)
            total += t
            small = small + 1 if abs(t) < mpmath.mpf(10) ** (-(dps - 10)) * max(1, abs(total)) else 0
            if small >= 5 or (z == 0 and k > 2):
                break
            k += 1
        return total


def gamma_oracle(a, dps: int = ORACLE_DPS):
    with mpmath.workdps(dps):
        return mpmath.gamma(mpmath.mpf(str(a)))


def gamma_by_integral(a, dps: int = 40):
    """Gamma(a) from its defining integral over (0, inf)."""
    with mpmath.workdps(dps):
        a = mpmath.mpf(str(a))
        return mpmath.quad(lambda t: mpmath.exp(-t) * t ** (a - 1), [0, 1, 10, mpmath.inf])


def pascal_row(l: int) -> list[int]:
    row = [1]
    for _ in range(l):
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
    return row


def stirling2_recurrence(m_max: int) -> list[list[int]]:
    s = [[0] * (m_max + 1) for _ in range(m_max + 1)]
    s[0][0] = 1
    for m in range(1, m_max + 1):
        for l in range(1, m + 1):
            s[m][l] = l * s[m - 1][l] + s[m - 1][l - 1]
    return s


def stirling2_enumerate(m: int, l: int) -> int:
    """Count set partitions of {0..m-1} into exactly l blocks by restricted-growth strings."""
    if m == 0:
        return 1 if l == 0 else 0

    def rec(i, used):
        if i == m:
            return 1 if used == l else 0
        total = 0
        for b in range(min(used + 1, l)):
            total += rec(i + 1, max(used, b + 1))
        return total

    return rec(0, 0)


def classic_bell_poly(x, m: int, dps: int = ORACLE_DPS):
    """e^{-x} sum_n n^m x^n / n!, truncated once the tail is negligible."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(str(x))
        total = mpmath.mpf(0)
        n = 0
        term_prev = None
        while True:
            t = mpmath.mpf(n) ** m * x**n / mpmath.factorial(n) if (n or m == 0) else mpmath.mpf(0)
            if n == 0 and m == 0:
                t = mpmath.mpf(1)
            total += t
            if n > max(3 * x, m + 5) and t < mpmath.mpf(10) ** (-(dps - 5)) * total:
                break
            n += 1
            term_prev = t
        return mpmath.exp(-x) * total


def poisson_pmf(lam, n: int, dps: int = ORACLE_DPS):
    with mpmath.workdps(dps):
        lam = mpmath.mpf(str(lam))
        return mpmath.exp(-lam) * lam**n / mpmath.factorial(n)


def frac_pmf_double_sum(mu, x, n: int, dps: int = ORACLE_DPS):
    """The pmf written out literally: (x^n/n!) sum_k (k+n)!/k! (-x)^k / Gamma(mu(k+n)+1)."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(str(x))
        mu = mpmath.mpf(str(mu))
        total = mpmath.mpf(0)
        k = 0
        quiet = 0
        while True:
            t = (
                mpmath.mpf(factorial(k + n) // factorial(k))
                * (-x) ** k
                / mpmath.gamma(mu * (k + n) + 1)
            )
            total += t
            quiet = quiet + 1 if abs(t) < mpmath.mpf(10) ** (-(dps - 5)) else 0
            if quiet >= 5:
                break
            k += 1
        return x**n / mpmath.factorial(n) * total


def egf_power_coeffs(l: int, m_max: int) -> list[Fraction]:
    """Exact coefficients of s^m in (e^s - 1)^l by truncated power-series multiplication."""
    base = [Fraction(0)] + [Fraction(1, factorial(k)) for k in range(1, m_max + 1)]
    out = [Fraction(1)] + [Fraction(0)] * m_max
    for _ in range(l):
        nxt = [Fraction(0)] * (m_max + 1)
        for i, a in enumerate(out):
            if a:
                for j in range(1, m_max + 1 - i):
                    nxt[i + j] += a * base[j]
        out = nxt
    return out


def binomial_direct(l: int, n: int) -> int:
    return comb(l, n)
