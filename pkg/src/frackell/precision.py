"""Configurable-precision numerics.

All real quantities are :class:`decimal.Decimal` values evaluated inside an
explicit :class:`decimal.Context`. Decimal contexts are thread-local, so every
routine here is safe to call from several threads at once; the shared caches
(pi, Spouge coefficients, gamma tables) are guarded by locks.
"""
from __future__ import annotations

import decimal
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Union

from .errors import DomainError, NonConvergenceError, RangeError

DEFAULT_DIGITS = 50
DEFAULT_TARGET = Decimal("1e-30")
MIN_DIGITS = 15
GUARD_DIGITS = 10
MAX_TERMS = 100_000
MAX_WORKING_DIGITS = 6000
EMAX = 999_999

Real = Union[int, float, str, Decimal, Fraction, "PrecReal"]


def working_context(digits: int, rounding: str = decimal.ROUND_HALF_EVEN) -> decimal.Context:
    return decimal.Context(
        prec=digits,
        rounding=rounding,
        Emax=EMAX,
        Emin=-EMAX,
        traps=[decimal.InvalidOperation, decimal.DivisionByZero, decimal.Overflow],
    )


def to_decimal(v: Real) -> Decimal:
    """Convert a user-facing number to Decimal.

    Floats go through ``repr`` so that ``0.7`` means the decimal 0.7 rather
    than its binary neighbour.
    """
    if isinstance(v, PrecReal):
        return v.value
    if isinstance(v, Decimal):
        d = v
    elif isinstance(v, bool):
        raise TypeError("booleans are not real numbers here")
    elif isinstance(v, float):
        if not math.isfinite(v):
            raise DomainError(f"non-finite value {v!r}")
        d = Decimal(repr(v))
    elif isinstance(v, Fraction):
        with decimal.localcontext(working_context(DEFAULT_DIGITS + GUARD_DIGITS)):
            d = Decimal(v.numerator) / Decimal(v.denominator)
    elif isinstance(v, (int, str)):
        try:
            d = Decimal(v.strip() if isinstance(v, str) else v)
        except decimal.InvalidOperation as exc:
            raise DomainError(f"cannot parse {v!r} as a real number") from exc
    else:
        raise TypeError(f"unsupported numeric type {type(v).__name__}")
    if not d.is_finite():
        raise DomainError(f"non-finite value {v!r}")
    return d


def bound_up(x: Decimal) -> Decimal:
    """Round an error estimate upward to a few significant digits."""
    with decimal.localcontext(working_context(8, decimal.ROUND_CEILING)):
        return +abs(x)


def ulp_bound(value: Decimal, digits: int) -> Decimal:
    """Half an ulp of ``value`` at ``digits`` significant digits (rounding error bound)."""
    if value == 0:
        return Decimal(0)
    return bound_up(Decimal(5).scaleb(value.adjusted() - digits))


@dataclass(frozen=True)
class PrecReal:
    """A Decimal value together with its precision and an absolute error bound."""

    value: Decimal
    precision: int = DEFAULT_DIGITS
    err_bound: Decimal = Decimal(0)

    def __post_init__(self):
        object.__setattr__(self, "value", to_decimal(self.value))
        object.__setattr__(self, "err_bound", to_decimal(self.err_bound))
        if not isinstance(self.precision, int) or self.precision < MIN_DIGITS:
            raise DomainError(f"precision must be an integer >= {MIN_DIGITS}, got {self.precision!r}")
        if self.err_bound < 0:
            raise DomainError("err_bound must be nonnegative")
        # drop the exponent of exact zeros (0E-59 -> 0)
        if self.err_bound == 0:
            object.__setattr__(self, "err_bound", Decimal(0))
        if self.value == 0:
            object.__setattr__(self, "value", Decimal(0))

    @classmethod
    def rounded(cls, value: Decimal, precision: int, err_bound: Decimal = Decimal(0)) -> "PrecReal":
        """Round ``value`` to ``precision`` digits, folding the rounding error into the bound."""
        with decimal.localcontext(working_context(precision)):
            r = +value
        if r == value:
            return cls(r, precision, bound_up(err_bound))
        with decimal.localcontext(working_context(max(len(value.as_tuple().digits), precision) + 2)):
            diff = abs(r - value)
        with decimal.localcontext(working_context(30, decimal.ROUND_CEILING)):
            total = err_bound + diff
        return cls(r, precision, bound_up(total))

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return str(self.value)

    def contains(self, other: Real, slack: Real = 0) -> bool:
        """True if ``other`` lies within err_bound (+ slack) of value."""
        with decimal.localcontext(working_context(self.precision + GUARD_DIGITS)):
            return abs(self.value - to_decimal(other)) <= self.err_bound + to_decimal(slack)


@dataclass(frozen=True, init=False)
class MuParam:
    """The fractional order, validated to lie in (0, 1]."""

    mu: Decimal

    def __init__(self, mu: Real):
        if isinstance(mu, MuParam):
            mu = mu.mu
        d = to_decimal(mu)
        if not (0 < d <= 1):
            raise DomainError(f"mu must satisfy 0 < mu <= 1, got {mu}")
        object.__setattr__(self, "mu", d)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.mu)

    @property
    def is_one(self) -> bool:
        return self.mu == 1

    def __float__(self) -> float:
        return float(self.mu)

    def __str__(self) -> str:
        return str(self.mu.normalize()) if self.mu != 1 else "1"


def as_mu(mu) -> MuParam:
    return mu if isinstance(mu, MuParam) else MuParam(mu)


@dataclass(frozen=True)
class SeriesResult:
    """Outcome of an infinite-series evaluation."""

    value: PrecReal
    terms_used: int
    max_term_magnitude: Decimal
    cancellation_digits: float

    @property
    def err_bound(self) -> Decimal:
        return self.value.err_bound

    @property
    def precision(self) -> int:
        return self.value.precision

    def scaled(self, factor: Decimal, factor_rel_err: Decimal = Decimal(0)) -> "SeriesResult":
        """Multiply by a positive-or-negative scalar, propagating the error bound."""
        wp = self.value.precision
        with decimal.localcontext(working_context(wp)):
            v = self.value.value * factor
            err = (
                self.value.err_bound * abs(factor)
                + abs(v) * factor_rel_err
                + ulp_bound(v, wp)
            )
            big = self.max_term_magnitude * abs(factor)
        return SeriesResult(PrecReal(v, wp, bound_up(err)), self.terms_used, big, self.cancellation_digits)


# -- pi ---------------------------------------------------------------------

_lock = threading.Lock()
_pi_cache: dict[int, Decimal] = {}


def _arctan_inv(x: int, unity: int) -> int:
    total = term = unity // x
    x2 = x * x
    n = 1
    sign = -1
    while term:
        term //= x2
        total += sign * (term // (2 * n + 1))
        sign = -sign
        n += 1
    return total


def pi_decimal(digits: int) -> Decimal:
    """pi to ``digits`` significant digits via Machin's formula in integer fixed point."""
    with _lock:
        cached = _pi_cache.get(digits)
    if cached is not None:
        return cached
    extra = 10
    unity = 10 ** (digits + extra)
    pi_int = 4 * (4 * _arctan_inv(5, unity) - _arctan_inv(239, unity))
    with decimal.localcontext(working_context(digits)):
        pi = +Decimal(pi_int).scaleb(-(digits + extra))
    with _lock:
        _pi_cache[digits] = pi
    return pi


# -- gamma ------------------------------------------------------------------

_LN_10 = math.log(10)
_LN_2PI = math.log(2 * math.pi)
_spouge_cache: dict[int, tuple[int, int, tuple[Decimal, ...]]] = {}


def _spouge_coefficients(digits: int) -> tuple[int, int, tuple[Decimal, ...]]:
    """Spouge parameter ``a``, working digits and coefficients c_0..c_{a-1}.

    The relative truncation error is at most a^(-1/2) (2 pi)^(-(a+1/2)),
    which is pushed below 10^-(digits+3).
    """
    with _lock:
        cached = _spouge_cache.get(digits)
    if cached is not None:
        return cached
    a = math.ceil((digits + 3) * _LN_10 / _LN_2PI)
    while 0.5 * math.log(a) + (a + 0.5) * _LN_2PI < (digits + 3) * _LN_10:
        a += 1
    guard = a // 2 + GUARD_DIGITS
    while True:
        wp = digits + guard
        with decimal.localcontext(working_context(wp + GUARD_DIGITS)) as ctx:
            # e^j for j = 0..a-1 by repeated multiplication
            e = Decimal(1).exp()
            epow = [Decimal(1)]
            for _ in range(a - 1):
                epow.append(epow[-1] * e)
            coeffs = [(2 * pi_decimal(wp + GUARD_DIGITS)).sqrt()]
            sqrt_digits = wp + GUARD_DIGITS
            scale = 10**sqrt_digits
            fact = 1
            for k in range(1, a):
                if k > 1:
                    fact *= k - 1
                base = a - k
                # (a-k)^(k-1/2) e^(a-k) / (k-1)!, the integer ratio kept exact until here
                root = Decimal(math.isqrt(base * scale * scale)).scaleb(-sqrt_digits)
                c = Decimal(base ** (k - 1)) / Decimal(fact) * root * epow[base]
                coeffs.append(c if k % 2 else -c)
            ctx.prec = wp
            coeffs = [+c for c in coeffs]
            biggest = max(abs(c) for c in coeffs)
        # coefficients alternate and grow; the guard must absorb the cancellation.
        if biggest.adjusted() + GUARD_DIGITS <= guard:
            break
        guard = biggest.adjusted() + 2 * GUARD_DIGITS
    entry = (a, wp, tuple(coeffs))
    with _lock:
        _spouge_cache[digits] = entry
    return entry


_EXACT_FACTORIAL_LIMIT = 3000
_HIGH_PRECISION = 150


def _iroot(n: int, k: int) -> int:
    """floor(n^(1/k)) for integers n >= 0, k >= 1."""
    if n < 2 or k == 1:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _exp_neg_int(x: int, digits: int) -> Decimal:
    with decimal.localcontext(working_context(digits)):
        return Decimal(-x).exp()


def _gamma_incomplete(y: Decimal, digits: int) -> Decimal:
    """Gamma(y) = X^y e^-X sum_k X^k / (y (y+1) ... (y+k)) + Gamma(y, X).

    X is chosen so the upper incomplete part is below 10^-(digits+2) relative;
    the series has positive terms and runs in integer fixed point, which is
    much cheaper than Spouge's coefficients at high precision.
    """
    frac = Fraction(y)
    a, b = frac.numerator, frac.denominator
    yf = float(y)
    d = digits + GUARD_DIGITS
    # Gamma(y, X) <= 2 X^(y-1) e^-X once X > 2y
    X = math.ceil(max(d * _LN_10, 2 * yf + 2))
    while (yf - 1) * math.log(X) - X + math.log(2) - math.lgamma(yf) > -(d + 2) * _LN_10:
        X += 16
    terms_est = 3 * X + 10
    W = d + math.ceil(math.log10(terms_est * (yf + 1))) + 2
    T = 10**W * b // a
    S = T
    k = 0
    while True:
        k += 1
        T = T * X * b // (a + k * b)
        S += T
        # past k = 2X the ratio is below 1/2, so a zero term ends the series
        if T == 0 and k > 2 * X:
            break
    whole, rest = divmod(a, b)
    with decimal.localcontext(working_context(d)):
        if rest == 0:
            frac_pow = Decimal(1)
        elif b <= 64:
            V = d + 2
            frac_pow = Decimal(_iroot(X**rest * 10 ** (V * b), b)).scaleb(-V)
        else:
            frac_pow = (Decimal(rest) / b * Decimal(X).ln()).exp()
        g = Decimal(X) ** whole * frac_pow * _exp_neg_int(X, d) * Decimal(S).scaleb(-W)
    return g



def gamma_decimal(y: Decimal, digits: int) -> Decimal:
    """Gamma(y) for y > 0, correct to about one unit in the last of ``digits`` places."""
    if y <= 0:
        raise DomainError(f"gamma argument must be positive, got {y}")
    if y == y.to_integral_value() and y <= _EXACT_FACTORIAL_LIMIT:
        with decimal.localcontext(working_context(digits)):
            return +Decimal(math.factorial(int(y) - 1))
    if digits >= _HIGH_PRECISION:
        try:
            with decimal.localcontext(working_context(digits)):
                return +_gamma_incomplete(y, digits)
        except decimal.Overflow as exc:
            raise RangeError(f"gamma({y}) overflows the exponent range") from exc
    a, wp, coeffs = _spouge_coefficients(digits)
    try:
        with decimal.localcontext(working_context(wp)) as ctx:
            shift = y < 1
            z = y if shift else y - 1  # Gamma(z + 1) is what the formula gives
            s = coeffs[0]
            for k in range(1, a):
                s += coeffs[k] / (z + k)
            za = z + a
            g = ((z + Decimal("0.5")) * za.ln() - za).exp() * s
            if shift:
                g = g / y
            ctx.prec = digits
            return +g
    except decimal.Overflow as exc:
        raise RangeError(f"gamma({y}) overflows the exponent range") from exc


def gamma_real(a: Real, precision: int = DEFAULT_DIGITS) -> PrecReal:
    """Gamma function for positive real arguments.

    Uses Spouge's approximation with its parameter chosen from ``precision``.
    Positive integers up to 3000 are computed exactly as factorials.

    Raises
    ------
    DomainError
        If ``a`` is not positive or ``precision`` is below 15.
    RangeError
        If the result overflows the exponent range.
    """
    if not isinstance(precision, int) or precision < MIN_DIGITS:
        raise DomainError(f"precision must be an integer >= {MIN_DIGITS}")
    y = to_decimal(a)
    if y <= 0:
        raise DomainError(f"gamma_real needs a > 0, got {a!r}")
    if y == y.to_integral_value() and y <= _EXACT_FACTORIAL_LIMIT:
        exact = math.factorial(int(y) - 1)
        return PrecReal.rounded(Decimal(exact), precision)
    g = gamma_decimal(y, precision + 5)
    with decimal.localcontext(working_context(precision)):
        v = +g
    err = abs(v) * Decimal(6).scaleb(-precision)
    return PrecReal(v, precision, bound_up(err))


def big_binomial(l: int, n: int) -> int:
    """Exact binomial coefficient l! / (n! (l-n)!)."""
    if not (isinstance(l, int) and isinstance(n, int)):
        raise TypeError("big_binomial takes integers")
    if not 0 <= n <= l:
        raise DomainError(f"big_binomial needs 0 <= n <= l, got l={l}, n={n}")
    return math.comb(l, n)


class GammaTable:
    """Lazily extended table of Gamma(mu*j + 1), j = 0, 1, 2, ...

    When mu = p/q with a small denominator, entries are advanced with the
    recurrence Gamma(y + p) = y (y+1) ... (y+p-1) Gamma(y), so only q values
    need a full gamma evaluation.
    """

    def __init__(self, mu: Decimal, digits: int):
        self.mu = mu
        self.digits = digits
        frac = Fraction(mu)
        self._p, self._q = frac.numerator, frac.denominator
        self._use_recurrence = self._q <= 1000
        self._values: list[Decimal] = []
        self._lock = threading.Lock()

    def _arg(self, j: int) -> Decimal:
        # mu*j + 1 exactly, as mu is a finite decimal
        return self.mu * j + 1

    def __getitem__(self, j: int) -> Decimal:
        values = self._values
        if j < len(values):
            return values[j]
        with self._lock:
            with decimal.localcontext(working_context(self.digits + GUARD_DIGITS)):
                while len(values) <= j:
                    i = len(values)
                    if self._use_recurrence and i >= self._q:
                        y = self._arg(i - self._q)
                        g = values[i - self._q]
                        for r in range(self._p):
                            g *= y + r
                    else:
                        g = gamma_decimal(self._arg(i), self.digits + GUARD_DIGITS)
                    values.append(g)
        return values[j]


_tables: "OrderedDict[tuple[Decimal, int], GammaTable]" = OrderedDict()
_TABLE_CACHE_SIZE = 64


def gamma_table(mu: Decimal, digits: int) -> GammaTable:
    key = (mu, digits)
    with _lock:
        table = _tables.get(key)
        if table is None:
            table = _tables[key] = GammaTable(mu, digits)
            if len(_tables) > _TABLE_CACHE_SIZE:
                _tables.popitem(last=False)
        else:
            _tables.move_to_end(key)
    return table


# -- adaptive summation ------------------------------------------------------


def quantize_digits(d: int) -> int:
    """Round a working precision up onto a coarse (~15% step) grid so caches are reused."""
    q = 60
    while q < d:
        q = int(q * 1.15) // 10 * 10 + 10
    return q


@dataclass
class _Pass:
    total: Decimal
    err: Decimal
    terms: int
    max_term: Decimal
    digits: int
    carried: Decimal = Decimal(0)


def _single_pass(term, target, floor, digits, max_terms, term_slack) -> _Pass:
    wp = digits + GUARD_DIGITS
    with decimal.localcontext(working_context(wp)):
        total = Decimal(0)
        abs_sum = Decimal(0)
        max_term = Decimal(0)
        carried = Decimal(0)
        prev = before = None
        decays = 0
        for k in range(max_terms):
            t = term(k)
            if isinstance(t, PrecReal):
                carried += t.err_bound
                t = t.value
            t = +t
            a = abs(t)
            total += t
            abs_sum += a
            if a > max_term:
                max_term = a
            if prev is not None:
                if a < prev or (a == 0 and prev == 0):
                    decays += 1
                else:
                    decays = 0
                if decays >= 3:
                    # geometric tail a r / (1 - r) with r = a / prev, kept division-free
                    threshold = max(target * abs(total), floor)
                    if a * a <= threshold * (prev - a):
                        tail = a * a / (prev - a) if a else Decimal(0)
                        rounding = abs_sum * (3 * (k + 1 + term_slack) + 50) * Decimal(1).scaleb(1 - wp)
                        return _Pass(total, bound_up(tail + rounding + carried), k + 1, max_term, wp, carried)
            before, prev = prev, a
    ratio = prev / before if before else None
    raise NonConvergenceError(
        f"series did not converge within {max_terms} terms (last term ratio {ratio})",
        terms=max_terms,
        last_ratio=ratio,
    )


def sum_adaptive(
    term: Callable[[int], Union[Decimal, PrecReal]],
    target_rel_err: Real = DEFAULT_TARGET,
    precision: int = DEFAULT_DIGITS,
    *,
    max_terms: int = MAX_TERMS,
    term_slack: int = 0,
    max_precision: int = MAX_WORKING_DIGITS,
    initial_digits: int | None = None,
) -> SeriesResult:
    """Sum ``term(0) + term(1) + ...`` to a relative tolerance.

    ``term`` is called with k = 0, 1, 2, ... in order, inside a decimal
    context set to the working precision of the current pass; it should
    compute at that precision. Terms may be plain Decimals or PrecReals
    (whose err_bound is carried into the result, but does not count
    against the convergence test).

    Summation stops once three consecutive terms have decreased and the
    geometric tail estimate |t_k| r / (1 - r) is below ``target_rel_err``
    times the partial sum (or the absolute floor 10^-precision). If the
    pass lost more digits to cancellation than ``precision`` minus the
    requested digits, it is repeated with ``ceil(cancellation) + 10`` more
    digits.

    ``term_slack`` adds to the per-term rounding allowance for generators
    whose terms carry accumulated rounding (e.g. long recurrences).
    ``initial_digits`` lets a caller that can predict the cancellation skip
    the low-precision first pass.
    """
    target = to_decimal(target_rel_err)
    if not Decimal("1e-200") < target < Decimal("1e-6"):
        raise DomainError(f"target_rel_err must lie in (1e-200, 1e-6), got {target_rel_err!r}")
    if not isinstance(precision, int) or precision < MIN_DIGITS:
        raise DomainError(f"precision must be an integer >= {MIN_DIGITS}")
    requested = math.ceil(-target.log10())
    floor = Decimal(1).scaleb(-precision)
    digits = precision
    if initial_digits is not None and initial_digits > precision:
        digits = min(quantize_digits(initial_digits), max_precision)
    while True:
        p = _single_pass(term, target, floor, digits, max_terms, term_slack)
        # an unresolved sum is rounding noise; measure the loss against the floor instead
        denom = max(abs(p.total), floor) if abs(p.total) > p.err else floor
        cancel = float((p.max_term / denom).log10()) if p.max_term else 0.0
        # error carried in by the terms is not reduced by more working digits
        own = p.err - p.carried
        converged = own <= max(target * abs(p.total), floor)
        if converged and cancel <= digits - requested:
            break
        if converged and own <= floor:
            break
        new_digits = quantize_digits(digits + math.ceil(max(cancel, 1.0)) + GUARD_DIGITS)
        if new_digits > max_precision:
            raise NonConvergenceError(
                f"cancellation of {cancel:.1f} digits needs more than {max_precision} working digits",
                terms=p.terms,
            )
        digits = new_digits
    value = PrecReal.rounded(p.total, precision, p.err)
    if p.max_term and abs(p.total) > p.err:
        cd = max(0.0, float((p.max_term / abs(p.total)).log10()))
    else:
        cd = 0.0
    return SeriesResult(value, p.terms, p.max_term, cd)
