"""The fractional Poisson distribution of event counts.

P_mu(n, t) = (x^n / n!) sum_k (k+n)!/k! (-x)^k / Gamma(mu (k+n) + 1),
x = nu t^mu, which is (x^n/n!) times the n-th derivative of E_mu at -x.
"""
from __future__ import annotations

import decimal
from dataclasses import dataclass, field
from decimal import Decimal

from .bell import BellEvalContext, bell_poly
from .errors import CapacityError, ContractError, DomainError
from .mittag_leffler import scaled_derivative, scaled_derivative_table
from .precision import (
    DEFAULT_DIGITS,
    DEFAULT_TARGET,
    GUARD_DIGITS,
    MuParam,
    PrecReal,
    Real,
    SeriesResult,
    as_mu,
    bound_up,
    to_decimal,
    working_context,
)

MAX_TABLE_N = 200


@dataclass(frozen=True)
class PmfParams:
    """Order mu, rate nu (units sec^-mu) and elapsed time t (sec)."""

    mu: MuParam
    nu: Decimal
    t: Decimal
    _x_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "mu", as_mu(self.mu))
        object.__setattr__(self, "nu", to_decimal(self.nu))
        object.__setattr__(self, "t", to_decimal(self.t))
        if self.nu <= 0:
            raise DomainError(f"nu must be positive, got {self.nu}")
        if self.t < 0:
            raise DomainError(f"t must be nonnegative, got {self.t}")

    def x(self, digits: int = DEFAULT_DIGITS + 2 * GUARD_DIGITS) -> Decimal:
        """The combined argument nu * t^mu, to ``digits`` significant digits."""
        cached = self._x_cache.get(digits)
        if cached is not None:
            return cached
        if self.t == 0:
            x = Decimal(0)
        else:
            with decimal.localcontext(working_context(digits)):
                x = self.nu * self.t if self.mu.is_one else self.nu * self.t**self.mu.mu
        self._x_cache[digits] = x
        return x


@dataclass(frozen=True)
class DistributionTable:
    params: PmfParams
    masses: tuple[PrecReal, ...]
    tail_bound: Decimal

    @property
    def n_max(self) -> int:
        return len(self.masses) - 1

    @property
    def total(self) -> Decimal:
        with decimal.localcontext(working_context(max(m.precision for m in self.masses))):
            return sum((m.value for m in self.masses), Decimal(0))


def pmf(
    params: PmfParams,
    n: int,
    target_rel_err: Real = DEFAULT_TARGET,
    precision: int = DEFAULT_DIGITS,
) -> SeriesResult:
    """P_mu(n, t). At t = 0 the law is degenerate at n = 0 and no series is summed."""
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    x = params.x(precision + 2 * GUARD_DIGITS)
    if x == 0:
        v = Decimal(1 if n == 0 else 0)
        return SeriesResult(PrecReal(v, precision), 1, v, 0.0)
    return scaled_derivative(params.mu, x, n, target_rel_err, precision)


def _table(params: PmfParams, masses: list[PrecReal]) -> DistributionTable:
    wp = max(m.precision for m in masses)
    with decimal.localcontext(working_context(wp)):
        total = sum((m.value for m in masses), Decimal(0))
        errs = sum((m.err_bound for m in masses), Decimal(0))
        tail = max(Decimal(0), 1 - total) + errs
    return DistributionTable(params, tuple(masses), bound_up(tail))


def pmf_table(
    params: PmfParams,
    n_max: int,
    target_rel_err: Real = DEFAULT_TARGET,
    precision: int = DEFAULT_DIGITS,
) -> DistributionTable:
    """Masses for n = 0..n_max; the tail bound is 1 - sum(masses) plus their error bounds."""
    if not isinstance(n_max, int) or not 0 <= n_max <= MAX_TABLE_N:
        raise DomainError(f"n_max must be an integer in [0, {MAX_TABLE_N}], got {n_max!r}")
    return _table(params, _masses(params, n_max, target_rel_err, precision))


def _masses(params: PmfParams, n_max: int, target_rel_err, precision: int) -> list[PrecReal]:
    x = params.x(precision + 2 * GUARD_DIGITS)
    if x == 0:
        return [PrecReal(Decimal(1 if n == 0 else 0), precision) for n in range(n_max + 1)]
    return [r.value for r in scaled_derivative_table(params.mu, x, n_max, target_rel_err, precision)]


def adaptive_pmf_table(
    params: PmfParams,
    tail_tol: Real = Decimal("1e-10"),
    n_cap: int = MAX_TABLE_N,
    target_rel_err: Real = DEFAULT_TARGET,
    precision: int = DEFAULT_DIGITS,
) -> DistributionTable:
    """The shortest table whose tail bound is at most ``tail_tol``.

    Masses are computed in blocks of doubling size; the returned table is
    cut at the first n_max that meets the tolerance.
    """
    tol = to_decimal(tail_tol)
    cap = min(n_cap, MAX_TABLE_N)
    size = min(16, cap)
    while True:
        masses = _masses(params, size, target_rel_err, precision)
        wp = max(m.precision for m in masses)
        with decimal.localcontext(working_context(wp)):
            total = Decimal(0)
            errs = Decimal(0)
            for n, m in enumerate(masses):
                total += m.value
                errs += m.err_bound
                if max(Decimal(0), 1 - total) + errs <= tol:
                    return _table(params, masses[: n + 1])
        if size >= cap:
            break
        size = min(cap, 2 * size)
    table = _table(params, masses)
    raise CapacityError(f"tail bound {table.tail_bound} still above {tol} at n_max={table.n_max}")


def moment(params: PmfParams, m: int, ctx: BellEvalContext) -> PrecReal:
    """Raw moment E[N^m] = B_mu(nu t^mu, m), evaluated through the Stirling expansion."""
    if ctx.mu != params.mu:
        raise ContractError(f"context mu={ctx.mu} does not match params mu={params.mu}")
    return bell_poly(ctx, params.x(ctx.precision + 2 * GUARD_DIGITS), m)
