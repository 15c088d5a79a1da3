"""One-parameter Mittag-Leffler function E_mu(z) and its derivatives, real z.

Everything is evaluated through one series kernel,

    S_n(z) = sum_{k>=0} binom(k+n, n) z^(k+n) / Gamma(mu (k+n) + 1),

which is the power series of E_mu differentiated n times and multiplied by
z^n / n!. Hence

    E_mu^(n)(z) = n! z^(-n) S_n(z)      (z != 0)
    P_mu(n, t)  = (-1)^n S_n(-x)          (x = nu t^mu)

The table of z^j / Gamma(mu j + 1) is shared between all n at a given
(mu, z, working precision), which is what makes full pmf tables affordable.
"""
from __future__ import annotations

import decimal
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from itertools import accumulate

from .errors import DomainError, NonConvergenceError
from .precision import (
    DEFAULT_DIGITS,
    DEFAULT_TARGET,
    GUARD_DIGITS,
    MAX_TERMS,
    MAX_WORKING_DIGITS,
    MuParam,
    PrecReal,
    Real,
    SeriesResult,
    as_mu,
    bound_up,
    gamma_decimal,
    gamma_table,
    quantize_digits,
    sum_adaptive,
    to_decimal,
    working_context,
)

MAX_DERIVATIVE_ORDER = 200


@dataclass(frozen=True)
class MLRequest:
    mu: MuParam
    z: Decimal
    derivative_order: int = 0
    target_rel_err: Decimal = field(default=DEFAULT_TARGET)

    def __post_init__(self):
        object.__setattr__(self, "mu", as_mu(self.mu))
        object.__setattr__(self, "z", to_decimal(self.z))
        object.__setattr__(self, "target_rel_err", to_decimal(self.target_rel_err))
        n = self.derivative_order
        if not isinstance(n, int) or isinstance(n, bool) or not 0 <= n <= MAX_DERIVATIVE_ORDER:
            raise DomainError(f"derivative_order must be an integer in [0, {MAX_DERIVATIVE_ORDER}], got {n!r}")


class _PowerTable:
    """z^j / Gamma(mu j + 1) for j = 0, 1, ..., extended on demand."""

    def __init__(self, mu: Decimal, z: Decimal, digits: int):
        self._gammas = gamma_table(mu, digits)
        self._z = z
        self._digits = digits
        self._values: list[Decimal] = []
        self._zpow = Decimal(1)
        self._lock = threading.Lock()

    def __getitem__(self, j: int) -> Decimal:
        values = self._values
        if j < len(values):
            return values[j]
        with self._lock, decimal.localcontext(working_context(self._digits + GUARD_DIGITS)):
            while len(values) <= j:
                i = len(values)
                if i:
                    self._zpow *= self._z
                values.append(self._zpow / self._gammas[i])
        return values[j]


_power_tables: "OrderedDict[tuple, _PowerTable]" = OrderedDict()
_power_lock = threading.Lock()
_POWER_CACHE_SIZE = 16


def _power_table(mu: Decimal, z: Decimal, digits: int) -> _PowerTable:
    key = (mu, z, digits)
    with _power_lock:
        table = _power_tables.get(key)
        if table is None:
            table = _power_tables[key] = _PowerTable(mu, z, digits)
            if len(_power_tables) > _POWER_CACHE_SIZE:
                _power_tables.popitem(last=False)
        else:
            _power_tables.move_to_end(key)
    return table


def _log10_peak_term(mu: float, z: float, n: int) -> tuple[float, int]:
    """Float estimate of log10 of the largest kernel term, and its index k.

    The index is MAX_TERMS when the terms are still growing there.
    """
    lz = math.log(abs(z))
    log_c = 0.0
    best, at = -math.inf, 0
    k = 0
    while True:
        j = k + n
        v = log_c + j * lz - math.lgamma(mu * j + 1)
        if v > best:
            best, at = v, k
        if (v < best - 5 and k > 2) or k >= MAX_TERMS:
            return best / math.log(10), at
        k += 1
        log_c += math.log((k + n) / k)


def _kernel(mu: MuParam, z: Decimal, n: int, target, precision: int) -> SeriesResult:
    # term k = binom(k+n, n) * b[k+n]; the binomial stays an exact integer and
    # b[j] carries about 2j roundings, covered by term_slack=n.
    state = {}

    def term(k: int) -> Decimal:
        if k == 0:
            state["b"] = _power_table(mu.mu, z, decimal.getcontext().prec)
            state["c"] = 1
        else:
            state["c"] = state["c"] * (k + n) // k
        return state["b"][k + n] * state["c"]

    start = None
    if z != 0:
        peak, at = _log10_peak_term(float(mu.mu), float(z), n)
        # fail before summing when the terms cannot have started to fall
        if at >= MAX_TERMS:
            raise NonConvergenceError(
                f"series terms still growing after {MAX_TERMS} terms (mu={mu}, z={z})", terms=MAX_TERMS
            )
        if z < 0 and peak > 0:
            # |S_n(z)| <= 1 for z < 0 (it is a probability), so the peak term
            # bounds the digits that cancellation will eat.
            start = precision + math.ceil(peak) + GUARD_DIGITS
            if start > MAX_WORKING_DIGITS:
                raise NonConvergenceError(
                    f"cancellation would need about {start} digits, above the {MAX_WORKING_DIGITS} limit"
                )
    return sum_adaptive(term, target, precision, term_slack=n, initial_digits=start)


def ml_eval(req: MLRequest, precision: int = DEFAULT_DIGITS) -> SeriesResult:
    """E_mu(z) = sum_m z^m / Gamma(mu m + 1)."""
    if req.derivative_order != 0:
        raise DomainError("ml_eval needs derivative_order == 0; use ml_derivative")
    return _kernel(req.mu, req.z, 0, req.target_rel_err, precision)


def ml_derivative(req: MLRequest, precision: int = DEFAULT_DIGITS) -> SeriesResult:
    """n-th derivative of E_mu at z, by termwise differentiation of the power series."""
    n = req.derivative_order
    if n < 1:
        raise DomainError("ml_derivative needs derivative_order >= 1; use ml_eval")
    z = req.z
    if z == 0:
        # only the k = 0 term survives: n! / Gamma(mu n + 1)
        g = gamma_table(req.mu.mu, precision + GUARD_DIGITS)[n]
        return sum_adaptive(
            lambda k: Decimal(math.factorial(n)) / g if k == 0 else Decimal(0),
            req.target_rel_err,
            precision,
        )
    s = _kernel(req.mu, z, n, req.target_rel_err, precision)
    with decimal.localcontext(working_context(s.precision + GUARD_DIGITS)):
        factor = math.factorial(n) / z**n
    return s.scaled(factor, Decimal(2).scaleb(-s.precision - GUARD_DIGITS))


def mittag_leffler(
    mu: Real | MuParam,
    z: Real,
    derivative_order: int = 0,
    *,
    target_rel_err: Real = DEFAULT_TARGET,
    precision: int = DEFAULT_DIGITS,
) -> SeriesResult:
    """Convenience wrapper dispatching to :func:`ml_eval` or :func:`ml_derivative`."""
    req = MLRequest(mu, z, derivative_order, target_rel_err)
    if derivative_order == 0:
        return ml_eval(req, precision)
    return ml_derivative(req, precision)


@lru_cache(maxsize=8192)
def _scaled_derivative_cached(mu: Decimal, x: Decimal, n: int, target: Decimal, precision: int) -> SeriesResult:
    s = _kernel(MuParam(mu), x.copy_negate(), n, target, precision)
    return s.scaled(Decimal(-1) if n % 2 else Decimal(1))


def scaled_derivative(
    mu: Real | MuParam,
    x: Real,
    n: int,
    target_rel_err: Real = DEFAULT_TARGET,
    precision: int = DEFAULT_DIGITS,
) -> SeriesResult:
    """(x^n / n!) times the n-th derivative of E_mu at -x.

    This is the probability of n events in the fractional Poisson law with
    x = nu t^mu. Results are memoised, since both the pmf tables and the
    double-series Bell evaluation request the same (mu, x, n) repeatedly.
    """
    req = MLRequest(mu, to_decimal(x).copy_negate(), n, target_rel_err)
    return _scaled_derivative_cached(req.mu.mu, req.z.copy_negate(), n, req.target_rel_err, precision)


# -- block evaluation of S_0 .. S_N -------------------------------------------
#
# With f(u) = sum_j b_j u^j (b_j = z^j / Gamma(mu j + 1)), S_n(z) is the n-th
# Taylor coefficient of f at u = 1. Repeated synthetic division by (u - 1)
# yields them all, using only additions. On fixed-point integers (scale
# 10^F) those additions are exact, so if every b_j is within one unit of
# the last place, |S_n - S~_n| <= (C(J+1, n+1) + 1) 10^-F for the series
# truncated at J, and J is chosen so the discarded tail is below 10^-F too.

BLOCK_MAX_ORDER = 1000
_LN10 = math.log(10)


def _log10_kernel_term(mu: float, lz: float, j: int, n: int) -> float:
    return (
        math.lgamma(j + 1) - math.lgamma(n + 1) - math.lgamma(j - n + 1) + j * lz - math.lgamma(mu * j + 1)
    ) / _LN10


def _unimodal_max(f, lo: int, hi: int) -> tuple[int, float]:
    """Integer argmax of a unimodal f on [lo, hi] by ternary search."""
    while hi - lo > 2:
        a = lo + (hi - lo) // 3
        b = hi - (hi - lo) // 3
        if f(a) < f(b):
            lo = a + 1
        else:
            hi = b
    best = max(range(lo, hi + 1), key=f)
    return best, f(best)


def _log10_ratio(mu: float, lz: float, j: int, n: int) -> float:
    # term(j+1) / term(j) for the kernel of order n
    return (math.log((j + 1) / (j + 1 - n)) + lz + math.lgamma(mu * j + 1) - math.lgamma(mu * j + mu + 1)) / _LN10


def _block_extent(mu: float, lz: float, n_max: int, scale_digits: int) -> int:
    """Smallest J >= 2 n_max + 2 beyond which every kernel term of order <= n_max
    is below 10^-(F+5) and shrinks at least twofold per step."""

    def ok(j: int) -> bool:
        return (
            _log10_ratio(mu, lz, j, n_max) <= -math.log10(2)
            and _log10_kernel_term(mu, lz, j, n_max) < -scale_digits - 5
        )

    lo = 2 * n_max + 2
    if ok(lo):
        return lo
    hi = lo
    while not ok(hi):
        lo, hi = hi, 2 * hi
        if hi > 50 * MAX_TERMS:
            raise NonConvergenceError("kernel block needs too many terms", terms=hi)
    # the ratio and the terms are decreasing past the peak, so ok() is monotone here
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class KernelBlock:
    """S_n(z) for n = 0..n_max with absolute error bounds, and the terms kept."""

    values: tuple[Decimal, ...]
    errors: tuple[Decimal, ...]
    log10_peaks: tuple[float, ...]
    terms: int


def kernel_block(mu: Real | MuParam, z: Real, n_max: int, abs_digits: int) -> KernelBlock:
    """All kernel sums S_0(z) .. S_{n_max}(z), each to about 10^-abs_digits absolute."""
    mu = as_mu(mu)
    z = to_decimal(z)
    if not isinstance(n_max, int) or not 0 <= n_max <= BLOCK_MAX_ORDER:
        raise DomainError(f"n_max must be an integer in [0, {BLOCK_MAX_ORDER}], got {n_max!r}")
    if z == 0:
        # S_n(0) = [n == 0]
        zero = (Decimal(0),) * (n_max + 1)
        return KernelBlock((Decimal(1),) + zero[1:], zero, (0.0,) * (n_max + 1), 1)
    key = (mu.mu, z, abs_digits)
    with _block_lock:
        block = _blocks.get(key)
        if block is not None:
            _blocks.move_to_end(key)
    # a larger block answers every smaller request
    if block is None or len(block.values) <= n_max:
        block = _compute_block(mu.mu, z, n_max, abs_digits)
        with _block_lock:
            _blocks[key] = block
            if len(_blocks) > _BLOCK_CACHE_SIZE:
                _blocks.popitem(last=False)
    if len(block.values) == n_max + 1:
        return block
    k = n_max + 1
    return KernelBlock(block.values[:k], block.errors[:k], block.log10_peaks[:k], block.terms)


def cached_block_order(mu: Real | MuParam, z: Real, abs_digits: int) -> int:
    """Largest n_max already computed for (mu, z, abs_digits), or -1."""
    key = (as_mu(mu).mu, to_decimal(z), abs_digits)
    with _block_lock:
        block = _blocks.get(key)
    return -1 if block is None else len(block.values) - 1


_blocks: "OrderedDict[tuple, KernelBlock]" = OrderedDict()
_block_lock = threading.Lock()
_BLOCK_CACHE_SIZE = 32


def _fixed_point_powers(mu_d: Decimal, z: Decimal, J: int, scale: int) -> list[int] | None:
    """round(10^scale z^j / Gamma(mu j + 1)) for j = 0..J, each within one unit.

    For mu = p/q the entries obey b_j = b_{j-q} z^q q^p / prod_{r=1..p} (p(j-q) + rq),
    so only q gamma values are needed. Entry j is computed with just enough
    digits for the largest entry that follows it on its chain, which falls
    off quickly past the peak. Returns None when q is too large for this.
    """
    frac = Fraction(mu_d)
    p, q = frac.numerator, frac.denominator
    if q > 64:
        return None
    mu = float(mu_d)
    lz = math.log(abs(float(z)))
    logs = [(j * lz - math.lgamma(mu * j + 1)) / _LN10 for j in range(J + 1)]
    suffix = logs[:]
    for j in range(J - 1, -1, -1):
        suffix[j] = max(suffix[j], suffix[j + 1])
    # three roundings per step along chains of length J/q, plus margin for the float logs
    g = math.ceil(math.log10(6 * (J / q + 2))) + 5
    top = scale + max(0, math.ceil(suffix[0])) + g + GUARD_DIGITS
    with decimal.localcontext(working_context(top)):
        b = [+(z**r) / gamma_decimal(mu_d * r + 1, top) for r in range(min(q, J + 1))]
        zq = z**q * q**p
    zq_at: dict[int, Decimal] = {}
    ctx = working_context(top)
    with decimal.localcontext(ctx):
        for j in range(q, J + 1):
            prec = max(20, scale + math.ceil(suffix[j]) + g)
            prec = min(top, -(-prec // 25) * 25)
            factor = zq_at.get(prec)
            if factor is None:
                factor = zq_at[prec] = _round_to(zq, prec)
            ctx.prec = prec
            i = j - q
            denom = math.prod(p * i + r * q for r in range(1, p + 1))
            b.append(b[i] * factor / denom)
        fixed = []
        for j, v in enumerate(b):
            if scale + logs[j] < -3:
                # below a thousandth of a unit
                fixed.append(0)
                continue
            ctx.prec = max(20, scale + math.ceil(logs[j]) + 10)
            fixed.append(int(v.scaleb(scale).to_integral_value()))
    return fixed


def _round_to(v: Decimal, digits: int) -> Decimal:
    with decimal.localcontext(working_context(digits)):
        return +v


def _compute_block(mu_d: Decimal, z: Decimal, n_max: int, abs_digits: int) -> KernelBlock:
    mu = float(mu_d)
    lz = math.log(abs(float(z)))
    # the scale F must cover the binomial growth C(J+1, n_max+1), which depends on J
    scale = abs_digits
    for _ in range(8):
        J = _block_extent(mu, lz, n_max, scale)
        need = abs_digits + math.ceil(math.log10(math.comb(J + 1, n_max + 1))) + 2
        if need <= scale:
            break
        scale = need
    _, peak_b = _unimodal_max(lambda j: j * lz / _LN10 - math.lgamma(mu * j + 1) / _LN10, 0, J)
    # b_j carries about 2j + 10 roundings at the table precision; keep that under half a unit
    table_digits = quantize_digits(scale + max(0, math.ceil(peak_b)) + math.ceil(math.log10(2 * J + 10)) + 3)
    fixed = _fixed_point_powers(mu_d, z, J, scale)
    if fixed is None:
        table = _power_table(mu_d, z, table_digits)
        with decimal.localcontext(working_context(table_digits + 2 * GUARD_DIGITS)):
            fixed = [int(table[j].scaleb(scale).to_integral_value()) for j in range(J + 1)]
    fixed.reverse()
    sums = []
    acc = fixed
    for _ in range(n_max + 1):
        acc = list(accumulate(acc))
        sums.append(acc.pop())
    with decimal.localcontext(working_context(table_digits + 2 * GUARD_DIGITS)):
        values = tuple(Decimal(s).scaleb(-scale) for s in sums)
        errors = tuple(
            bound_up(Decimal(math.comb(J + 1, n + 1) + 2).scaleb(-scale)) for n in range(n_max + 1)
        )
    peaks = tuple(
        _unimodal_max(lambda j, n=n: _log10_kernel_term(mu, lz, j, n), n, J)[1] for n in range(n_max + 1)
    )
    return KernelBlock(values, errors, peaks, J + 1)


def table_abs_digits(target_rel_err: Real, precision: int, extra_digits: int = 0) -> int:
    requested = math.ceil(-to_decimal(target_rel_err).log10())
    return precision + requested + GUARD_DIGITS + extra_digits


def scaled_derivative_table(
    mu: Real | MuParam,
    x: Real,
    n_max: int,
    target_rel_err: Real = DEFAULT_TARGET,
    precision: int = DEFAULT_DIGITS,
    extra_digits: int = 0,
    relative: bool = True,
) -> tuple[SeriesResult, ...]:
    """:func:`scaled_derivative` for n = 0..n_max in one sweep.

    With ``relative`` (the default) every value meets ``target_rel_err``
    relative to itself, however small; the block is recomputed with more
    absolute digits until it does. Otherwise each value is accurate to
    about 10^-(precision + requested digits + extra_digits) absolute.
    """
    mu = as_mu(mu)
    xd = to_decimal(x)
    if xd < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    target = to_decimal(target_rel_err)
    digits = table_abs_digits(target, precision, extra_digits)
    while True:
        block = kernel_block(mu, xd.copy_negate(), n_max, digits)
        if not relative:
            break
        deficit = 0.0
        for v, e in zip(block.values, block.errors):
            if e <= target * abs(v):
                continue
            if abs(v) > e:
                deficit = max(deficit, float((e / (target * abs(v))).log10()))
            else:
                # not even the sign is resolved; double the digits
                deficit = max(deficit, float(digits))
        if deficit == 0:
            break
        digits += math.ceil(deficit) + GUARD_DIGITS
        if digits > MAX_WORKING_DIGITS:
            raise NonConvergenceError(f"pmf table needs more than {MAX_WORKING_DIGITS} digits")
    out = []
    for n, (v, e, peak) in enumerate(zip(block.values, block.errors, block.log10_peaks)):
        if n % 2:
            v = v.copy_negate()
        value = PrecReal.rounded(v, precision, e)
        cd = max(0.0, peak - float(abs(v).log10())) if v else 0.0
        out.append(SeriesResult(value, block.terms, Decimal(10) ** Decimal(repr(round(peak, 6))), cd))
    return tuple(out)
