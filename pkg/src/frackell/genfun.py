"""Generating functions of the fractional Bell and Stirling families.

    F_mu(s, x)  = sum_m s^m/m! B_mu(x, m)           = E_mu(x (e^s - 1))
    B_mu(s)     = sum_m s^m/m! B_mu(m)              = E_mu(e^s - 1)
    G_mu(s, l)  = sum_{m>=l} S_mu(m, l) s^m/m!      = (e^s - 1)^l / Gamma(mu l + 1)
    F_mu(s, t)  = sum_m sum_l S_mu(m, l) s^m t^l/m! = E_mu(t (e^s - 1))

The ``verify_*`` functions compare Taylor coefficients of the closed forms,
assembled from exact expansions of (e^s - 1)^l, with the polynomial and
Stirling values computed elsewhere in the package.
"""
from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .bell import BellEvalContext, bell_poly
from .errors import DomainError
from .mittag_leffler import MLRequest, ml_eval
from .precision import (
    DEFAULT_DIGITS,
    DEFAULT_TARGET,
    GUARD_DIGITS,
    MuParam,
    PrecReal,
    Real,
    as_mu,
    big_binomial,
    bound_up,
    gamma_real,
    to_decimal,
    working_context,
)
from .stirling import stirling_value

DEFAULT_TOLERANCE = Decimal("1e-9")
MAX_GF_ORDER = 60


def _expm1(s: Decimal, digits: int) -> Decimal:
    with decimal.localcontext(working_context(digits)):
        if s == 0:
            return Decimal(0)
        # exp(s) - 1 loses about -log10|s| digits for small s; pay for them up front
        extra = max(0, -s.adjusted())
        decimal.getcontext().prec = digits + extra
        v = s.exp() - 1
        decimal.getcontext().prec = digits
        return +v


def _ml_at(mu: MuParam, s: Decimal, x: Decimal, precision: int) -> PrecReal:
    arg_digits = precision + 2 * GUARD_DIGITS
    em1 = _expm1(s, arg_digits)
    with decimal.localcontext(working_context(arg_digits)):
        z = x * em1
    return ml_eval(MLRequest(mu, z, 0, DEFAULT_TARGET), precision).value


def gf_bell_poly(mu: Real | MuParam, s: Real, x: Real, precision: int = DEFAULT_DIGITS) -> PrecReal:
    """F_mu(s, x) = E_mu(x (e^s - 1))."""
    return _ml_at(as_mu(mu), to_decimal(s), to_decimal(x), precision)


def gf_bell_numbers(mu: Real | MuParam, s: Real, precision: int = DEFAULT_DIGITS) -> PrecReal:
    """B_mu(s) = E_mu(e^s - 1)."""
    return _ml_at(as_mu(mu), to_decimal(s), Decimal(1), precision)


def gf_stirling_bivariate(mu: Real | MuParam, s: Real, t: Real, precision: int = DEFAULT_DIGITS) -> PrecReal:
    """F_mu(s, t) = E_mu(t (e^s - 1)); the same function of its arguments as gf_bell_poly."""
    return _ml_at(as_mu(mu), to_decimal(s), to_decimal(t), precision)


def gf_stirling_fixed_l(mu: Real | MuParam, s: Real, l: int, precision: int = DEFAULT_DIGITS) -> PrecReal:
    """G_mu(s, l) = (e^s - 1)^l / Gamma(mu l + 1)."""
    mu = as_mu(mu)
    if not isinstance(l, int) or l < 0:
        raise DomainError(f"l must be a nonnegative integer, got {l!r}")
    if l == 0:
        return PrecReal(Decimal(1), precision)
    wp = precision + GUARD_DIGITS
    em1 = _expm1(to_decimal(s), wp + GUARD_DIGITS)
    g = gamma_real(mu.mu * l + 1, wp)
    with decimal.localcontext(working_context(wp)):
        v = em1**l / g.value
        err = abs(v) * (g.err_bound / g.value + (l + 2) * Decimal(1).scaleb(1 - wp))
    return PrecReal.rounded(v, precision, err)


@dataclass(frozen=True)
class GenFunEntry:
    m: int
    coefficient_from_genfun: Decimal
    coefficient_from_polynomials: Decimal
    abs_diff: Decimal
    tolerance: Decimal
    exact_zero: bool = False

    @property
    def passed(self) -> bool:
        return self.abs_diff <= self.tolerance


@dataclass(frozen=True)
class GenFunReport:
    """Per-order comparison of generating-function coefficients."""

    kind: str
    mu: MuParam
    x_or_t: Decimal | None
    order_checked: int
    entries: tuple[GenFunEntry, ...]
    l: int | None = None

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> list[GenFunEntry]:
        return [e for e in self.entries if not e.passed]


def _egf_power(l: int, m_max: int) -> list[Fraction]:
    """Coefficients of s^0..s^m_max in (e^s - 1)^l by truncated series multiplication."""
    base = [Fraction(0)] + [Fraction(1, math.factorial(k)) for k in range(1, m_max + 1)]
    out = [Fraction(1)] + [Fraction(0)] * m_max
    for _ in range(l):
        nxt = [Fraction(0)] * (m_max + 1)
        for i, a in enumerate(out):
            if a:
                for j in range(1, m_max + 1 - i):
                    nxt[i + j] += a * base[j]
        out = nxt
    return out


def _entry(m: int, a: Decimal, b: Decimal, tol: Decimal, exact_zero: bool = False) -> GenFunEntry:
    with decimal.localcontext(working_context(60)):
        diff = abs(a - b)
    return GenFunEntry(m, a, b, bound_up(diff) if diff else Decimal(0), tol, exact_zero)


def verify_bell_gf(
    mu: Real | MuParam,
    x: Real,
    M: int,
    ctx: BellEvalContext,
    tolerance: Real = DEFAULT_TOLERANCE,
) -> GenFunReport:
    """Compare B_mu(x, m)/m! with the s^m coefficient of E_mu(x (e^s - 1)), m = 0..M.

    The closed-form coefficient is sum_l x^l [s^m](e^s - 1)^l / Gamma(mu l + 1),
    with the bracket computed exactly by power-series multiplication; only
    the gamma values are shared with the polynomial side.
    """
    mu = as_mu(mu)
    if mu != ctx.mu:
        raise DomainError(f"context mu={ctx.mu} differs from mu={mu}")
    if not isinstance(M, int) or not 0 <= M <= min(ctx.m_max, MAX_GF_ORDER):
        raise DomainError(f"M must lie in [0, min(triangle order, {MAX_GF_ORDER})], got {M!r}")
    xd = to_decimal(x)
    tol = to_decimal(tolerance)
    p = ctx.precision
    wp = p + GUARD_DIGITS
    powers = [_egf_power(l, M) for l in range(M + 1)]
    gammas = [gamma_real(mu.mu * l + 1, wp).value for l in range(M + 1)]
    entries = []
    for m in range(M + 1):
        with decimal.localcontext(working_context(wp)):
            coeff = Decimal(0)
            for l in range(m + 1):
                e = powers[l][m]
                if e:
                    coeff += Decimal(e.numerator) / e.denominator * xd**l / gammas[l]
            poly = bell_poly(ctx, xd, m).value / math.factorial(m)
        entries.append(_entry(m, coeff, poly, tol))
    return GenFunReport("bell", mu, xd, M, tuple(entries))


def verify_stirling_gf(
    mu: Real | MuParam,
    l: int,
    M: int,
    tolerance: Real = DEFAULT_TOLERANCE,
    precision: int = DEFAULT_DIGITS,
) -> GenFunReport:
    """Compare S_mu(m, l)/m! with the s^m coefficient of (e^s - 1)^l / Gamma(mu l + 1).

    (e^s - 1)^l is expanded as sum_n (-1)^(l-n) binom(l, n) e^(ns), whose s^m
    coefficient is an exact integer over m!. Orders m < l must give exact zeros.
    """
    mu = as_mu(mu)
    if not isinstance(l, int) or not isinstance(M, int) or not 0 <= l <= M <= MAX_GF_ORDER:
        raise DomainError(f"need 0 <= l <= M <= {MAX_GF_ORDER}, got l={l!r}, M={M!r}")
    tol = to_decimal(tolerance)
    wp = precision + GUARD_DIGITS
    g = gamma_real(mu.mu * l + 1, wp).value
    entries = []
    for m in range(M + 1):
        numer = sum(
            (1 if (l - n) % 2 == 0 else -1) * big_binomial(l, n) * n**m for n in range(l + 1)
        )
        s_val = stirling_value(mu, m, l, precision).value
        if numer == 0:
            entries.append(_entry(m, Decimal(0), s_val, tol, exact_zero=(s_val == 0)))
            continue
        with decimal.localcontext(working_context(wp)):
            coeff = Decimal(numer) / math.factorial(m) / g
            poly = s_val / math.factorial(m)
        entries.append(_entry(m, coeff, poly, tol))
    return GenFunReport("stirling", mu, None, M, tuple(entries), l=l)
