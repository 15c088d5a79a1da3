"""Fractional Bell polynomials B_mu(x, m) and Bell numbers B_mu(m).

Two independent evaluation routes are provided:

* :func:`bell_poly` -- the finite expansion sum_l S_mu(m, l) x^l, the
  canonical path;
* :func:`bell_poly_series` -- the defining double series
  sum_n n^m (x^n/n!) sum_k (k+n)!/k! (-x)^k / Gamma(mu(k+n)+1), kept as a
  verification path.
"""
from __future__ import annotations

import decimal
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

from .errors import CapacityError, DomainError, NonConvergenceError
from .mittag_leffler import BLOCK_MAX_ORDER, cached_block_order, scaled_derivative_table, table_abs_digits
from .precision import (
    DEFAULT_DIGITS,
    DEFAULT_TARGET,
    GUARD_DIGITS,
    MIN_DIGITS,
    MuParam,
    PrecReal,
    Real,
    SeriesResult,
    as_mu,
    bound_up,
    gamma_decimal,
    sum_adaptive,
    to_decimal,
    working_context,
)
from .stirling import StirlingTriangle, build_triangle

SERIES_MAX_ORDER = 30
SERIES_MAX_X = 30


@dataclass(frozen=True)
class BellEvalContext:
    """A fractional order paired with a prebuilt numerator triangle.

    The gamma denominators Gamma(mu l + 1), l <= m_max, are computed once at
    construction.
    """

    mu: MuParam
    triangle: StirlingTriangle
    precision: int = DEFAULT_DIGITS
    _gammas: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mu", as_mu(self.mu))
        if not isinstance(self.precision, int) or self.precision < MIN_DIGITS:
            raise DomainError(f"precision must be an integer >= {MIN_DIGITS}")
        wp = self.precision + GUARD_DIGITS
        if self.mu.is_one:
            gammas = tuple(math.factorial(l) for l in range(self.triangle.m_max + 1))
        else:
            gammas = tuple(gamma_decimal(self.mu.mu * l + 1, wp) for l in range(self.triangle.m_max + 1))
        object.__setattr__(self, "_gammas", gammas)

    @classmethod
    def build(cls, mu, m_max: int, precision: int = DEFAULT_DIGITS) -> "BellEvalContext":
        return cls(as_mu(mu), build_triangle(m_max), precision)

    @property
    def m_max(self) -> int:
        return self.triangle.m_max

    def _check(self, m: int) -> None:
        if not isinstance(m, int) or m < 0:
            raise DomainError(f"m must be a nonnegative integer, got {m!r}")
        if m > self.triangle.m_max:
            raise CapacityError(f"m={m} exceeds the triangle order {self.triangle.m_max}; rebuild the context")


def bell_poly(ctx: BellEvalContext, x: Real, m: int) -> PrecReal:
    """B_mu(x, m) = sum_{l=0}^{m} c(m, l) x^l / Gamma(mu l + 1), for any real x."""
    ctx._check(m)
    p = ctx.precision
    if m == 0:
        return PrecReal(Decimal(1), p)
    row = ctx.triangle.row(m)
    xd = to_decimal(x)
    if ctx.mu.is_one:
        # exact rational arithmetic; only the final division rounds
        xf = Fraction(xd)
        total = sum(Fraction(c, ctx._gammas[l]) * xf**l for l, c in enumerate(row) if c)
        wp = p + GUARD_DIGITS
        with decimal.localcontext(working_context(wp)):
            v = Decimal(total.numerator) / Decimal(total.denominator)
        div_err = abs(v) * Decimal(1).scaleb(1 - wp) if total.denominator != 1 else Decimal(0)
        return PrecReal.rounded(v, p, div_err)
    wp = p + GUARD_DIGITS
    with decimal.localcontext(working_context(wp)):
        total = Decimal(0)
        magnitude = Decimal(0)
        xpow = Decimal(1)
        for l, c in enumerate(row):
            if l:
                xpow *= xd
            if c:
                t = c * xpow / ctx._gammas[l]
                total += t
                magnitude += abs(t)
        err = magnitude * (2 * m + 20) * Decimal(1).scaleb(1 - wp)
    return PrecReal.rounded(total, p, err)


def bell_number(ctx: BellEvalContext, m: int) -> PrecReal:
    """B_mu(m) = B_mu(1, m) = sum_l S_mu(m, l)."""
    return bell_poly(ctx, 1, m)


def bell_poly_series(
    mu: Real | MuParam,
    x: Real,
    m: int,
    target_rel_err: Real = DEFAULT_TARGET,
    precision: int = DEFAULT_DIGITS,
) -> SeriesResult:
    """B_mu(x, m) from the double series, for 0 <= x <= 30 and m <= 30.

    The inner k-series is the n-th Mittag-Leffler derivative at -x, scaled by
    x^n/n!; the outer n-series has nonnegative terms. The inner sums come
    from one block evaluation, regrown when the outer series needs more n.
    """
    mu = as_mu(mu)
    xd = to_decimal(x)
    target = to_decimal(target_rel_err)
    if not 0 <= xd <= SERIES_MAX_X:
        raise DomainError(f"series path needs 0 <= x <= {SERIES_MAX_X}, got {x!r}")
    if not isinstance(m, int) or not 0 <= m <= SERIES_MAX_ORDER:
        raise DomainError(f"series path needs 0 <= m <= {SERIES_MAX_ORDER}, got {m!r}")
    if xd == 0:
        v = Decimal(1 if m == 0 else 0)
        return SeriesResult(PrecReal(v, precision), 1, v, 0.0)
    # absolute accuracy of the weights must survive multiplication by n^m;
    # fixed across m so that one block serves every order
    extra = 3 * (SERIES_MAX_ORDER + 1)
    n_max = max(32, cached_block_order(mu, xd.copy_negate(), table_abs_digits(target, precision, extra)))
    while True:
        weights = scaled_derivative_table(mu, xd, n_max, target, precision, extra, relative=False)

        def term(n: int) -> PrecReal | Decimal:
            if n == 0 and m > 0:
                return Decimal(0)
            w = weights[n].value
            c = n**m
            return PrecReal(c * w.value, max(decimal.getcontext().prec, MIN_DIGITS), c * w.err_bound)

        try:
            return sum_adaptive(term, target, precision, max_terms=n_max + 1)
        except NonConvergenceError:
            if n_max >= BLOCK_MAX_ORDER:
                raise
        n_max = min(BLOCK_MAX_ORDER, _next_order(weights, m, target, n_max))


def _next_order(weights, m: int, target: Decimal, n_max: int) -> int:
    """Extrapolate the decay of n^m P(n) to guess how many n the outer sum needs."""
    logs = []
    for n in (n_max - 1, n_max):
        v = abs(weights[n].value.value)
        logs.append(float(v.log10()) + m * math.log10(n) if v else -math.inf)
    total = sum(float(w.value.value) * n**m for n, w in enumerate(weights))
    slope = logs[1] - logs[0]
    if not slope < -1e-3 or total <= 0:
        return 2 * n_max
    drop = logs[1] - (float(target.log10()) + math.log10(total) - 2)
    return n_max + max(8, math.ceil(drop / -slope) + 8)
