"""Fractional Stirling numbers of the second kind.

S_mu(m, l) = c(m, l) / Gamma(mu*l + 1) with the integer numerator

    c(m, l) = sum_{n=0}^{l} (-1)^(l-n) binom(l, n) n^m.

Numerators are stored exactly; the gamma denominator is applied only when a
numerical value is requested.
"""
from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from decimal import Decimal
from operator import mul

from .errors import DomainError
from .precision import (
    DEFAULT_DIGITS,
    GUARD_DIGITS,
    MIN_DIGITS,
    MuParam,
    PrecReal,
    as_mu,
    big_binomial,
    bound_up,
    gamma_decimal,
    working_context,
)

MAX_TRIANGLE_ORDER = 500


def _check_order(m_max) -> None:
    if not isinstance(m_max, int) or isinstance(m_max, bool) or not 1 <= m_max <= MAX_TRIANGLE_ORDER:
        raise DomainError(f"m_max must be an integer in [1, {MAX_TRIANGLE_ORDER}], got {m_max!r}")


def _signed_binomials(l: int) -> list[int]:
    return [big_binomial(l, n) if (l - n) % 2 == 0 else -big_binomial(l, n) for n in range(l + 1)]


def stirling_numerator(m: int, l: int) -> int:
    """The exact alternating sum c(m, l); zero outside 0 <= l <= m except c(0, 0) = 1."""
    if m < 0 or l < 0:
        raise DomainError(f"m and l must be nonnegative, got m={m}, l={l}")
    if l > m:
        return 0
    if l == 0:
        return 1 if m == 0 else 0
    return sum(map(mul, _signed_binomials(l), (n**m for n in range(l + 1))))


@dataclass(frozen=True)
class StirlingTriangle:
    """Exact numerators c(m, l) for 0 <= l <= m <= m_max.

    ``numerators[m]`` is the row (c(m, 0), ..., c(m, m)). Indexing with
    ``tri[m, l]`` returns 0 for l > m.
    """

    m_max: int
    numerators: tuple[tuple[int, ...], ...]

    def __getitem__(self, key: tuple[int, int]) -> int:
        m, l = key
        if not 0 <= m <= self.m_max:
            raise IndexError(f"row {m} outside triangle of order {self.m_max}")
        if l < 0:
            raise IndexError("negative column")
        row = self.numerators[m]
        return row[l] if l < len(row) else 0

    def row(self, m: int) -> tuple[int, ...]:
        return self.numerators[m]

    def evaluate(self, mu, precision: int = DEFAULT_DIGITS) -> list[list[PrecReal]]:
        """Rows of S_mu(m, l) as PrecReals."""
        mu = as_mu(mu)
        return [
            [_divide_by_gamma(c, mu, l, precision) for l, c in enumerate(row)]
            for row in self.numerators
        ]


def build_triangle(m_max: int) -> StirlingTriangle:
    """Build the numerator triangle up to row ``m_max`` (1 <= m_max <= 500).

    Each entry is the literal alternating sum, accumulated in exact integers.
    """
    _check_order(m_max)
    signed = [_signed_binomials(l) for l in range(m_max + 1)]
    rows = [(1,)]
    for m in range(1, m_max + 1):
        powers = [n**m for n in range(m + 1)]
        row = [0] + [sum(map(mul, signed[l], powers)) for l in range(1, m + 1)]
        rows.append(tuple(row))
    return StirlingTriangle(m_max, tuple(rows))


def classic_stirling_triangle(m_max: int) -> tuple[tuple[int, ...], ...]:
    """Classic S(m, l) from S(m, l) = l S(m-1, l) + S(m-1, l-1), S(0, 0) = 1."""
    _check_order(m_max)
    rows = [(1,)]
    for m in range(1, m_max + 1):
        prev = rows[-1]
        row = [0] * (m + 1)
        for l in range(1, m + 1):
            row[l] = (l * prev[l] if l < len(prev) else 0) + prev[l - 1]
        rows.append(tuple(row))
    return tuple(rows)


def _divide_by_gamma(c: int, mu: MuParam, l: int, precision: int) -> PrecReal:
    if c == 0:
        return PrecReal(Decimal(0), precision)
    if mu.is_one:
        # Gamma(l+1) = l! exactly, and l! divides c(m, l)
        return PrecReal.rounded(Decimal(c // math.factorial(l)), precision)
    g = gamma_decimal(mu.mu * l + 1, precision + GUARD_DIGITS)
    with decimal.localcontext(working_context(precision + GUARD_DIGITS)):
        v = Decimal(c) / g
    out = PrecReal.rounded(v, precision)
    # gamma carries ~1 ulp at precision+10 digits, well inside this allowance
    return PrecReal(out.value, precision, bound_up(out.err_bound + abs(out.value) * Decimal(1).scaleb(-precision)))


def stirling_value(mu, m: int, l: int, precision: int = DEFAULT_DIGITS) -> PrecReal:
    """S_mu(m, l) = c(m, l) / Gamma(mu l + 1) at the requested precision.

    Exactly 0 when l > m or (l = 0, m > 0); exactly 1 when l = m = 0.
    For mu = 1 the gamma factor is the exact factorial, so the result is the
    integer Stirling number S(m, l).
    """
    mu = as_mu(mu)
    if not isinstance(precision, int) or precision < MIN_DIGITS:
        raise DomainError(f"precision must be an integer >= {MIN_DIGITS}")
    return _divide_by_gamma(stirling_numerator(m, l), mu, l, precision)
