"""Verification suites run by ``frackell check``.

Each suite returns a :class:`CheckReport` listing individual comparisons;
failures are data, not exceptions.
"""
from __future__ import annotations

import decimal
import math
import time
from dataclasses import dataclass, field
from decimal import Decimal

from .bell import BellEvalContext, bell_poly, bell_poly_series
from .errors import DomainError
from .genfun import gf_bell_numbers, gf_bell_poly, gf_stirling_bivariate, verify_bell_gf, verify_stirling_gf
from .mittag_leffler import mittag_leffler
from .poisson import PmfParams, adaptive_pmf_table, moment, pmf_table
from .precision import DEFAULT_DIGITS, MuParam, as_mu, working_context
from .stirling import classic_stirling_triangle, stirling_value

SUITES = ("mu1", "normalization", "genfun", "stirling-gf", "dualpath", "moments")
DEFAULT_MUS = ("0.25", "0.5", "0.75", "1")

REL_MU1 = Decimal("1e-12")
NORMALIZATION_TOL = Decimal("1e-10")
GF_TOL = Decimal("1e-9")
DUALPATH_ABS = Decimal("1e-20")
DUALPATH_TARGET = Decimal("1e-32")
DUALPATH_X = ("0.1", "0.5", "1", "2", "5")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: Decimal
    tolerance: Decimal
    detail: str = ""


@dataclass
class CheckReport:
    suite: str
    mus: tuple[str, ...]
    results: list[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def add(self, name: str, measured: Decimal, tolerance: Decimal, detail: str = "") -> None:
        self.results.append(CheckResult(name, measured <= tolerance, measured, tolerance, detail))


def _rel(a: Decimal, b: Decimal) -> Decimal:
    with decimal.localcontext(working_context(60)):
        d = abs(a - b)
        return d / abs(b) if b else d


# -- mu = 1 reductions ---------------------------------------------------------


def _poisson_ref(lam: Decimal, n: int, digits: int) -> Decimal:
    with decimal.localcontext(working_context(digits)):
        return (-lam).exp() * lam**n / math.factorial(n)


def _classic_bell_ref(x: Decimal, m: int, digits: int) -> Decimal:
    """e^-x sum_n n^m x^n / n!, summed until the terms are negligible and falling."""
    with decimal.localcontext(working_context(digits)):
        total = Decimal(0)
        term_x = Decimal(1)  # x^n / n!
        n = 0
        prev = None
        while True:
            t = term_x * n**m
            total += t
            if prev is not None and n > x and t < prev and t <= total.scaleb(-digits):
                break
            prev = t
            n += 1
            term_x = term_x * x / n
        return total * (-x).exp()


def _suite_mu1(report: CheckReport, precision: int) -> None:
    digits = precision + 20
    for lam in ("0.5", "1", "2", "5", "10"):
        table = pmf_table(PmfParams(1, lam, 1), 50, precision=precision)
        worst = max(
            _rel(m.value, _poisson_ref(Decimal(lam), n, digits)) for n, m in enumerate(table.masses)
        )
        report.add(f"poisson lambda={lam} n<=50", worst, REL_MU1)
    ctx = BellEvalContext.build(1, 8, precision)
    for x in DUALPATH_X:
        worst = max(_rel(bell_poly(ctx, x, m).value, _classic_bell_ref(Decimal(x), m, digits)) for m in range(9))
        report.add(f"bell polynomial x={x} m<=8", worst, REL_MU1)
    tri = classic_stirling_triangle(30)
    mismatches = sum(
        stirling_value(1, m, l, precision).value != tri[m][l] for m in range(31) for l in range(m + 1)
    )
    report.add("stirling S_1(m,l) = S(m,l), m<=30", Decimal(mismatches), Decimal(0))
    for s in ("-1", "-0.5", "0.1", "0.5", "1"):
        sd = Decimal(s)
        with decimal.localcontext(working_context(digits)):
            em1 = sd.exp() - 1
            bn_ref = em1.exp()
        report.add(f"gf bell numbers s={s}", _rel(gf_bell_numbers(1, s, precision).value, bn_ref), REL_MU1)
        for x in ("0.5", "1", "2"):
            with decimal.localcontext(working_context(digits)):
                ref = (Decimal(x) * em1).exp()
            report.add(f"gf bell polynomial s={s} x={x}", _rel(gf_bell_poly(1, s, x, precision).value, ref), REL_MU1)
    for z in ("-5", "-1", "0.5", "3"):
        with decimal.localcontext(working_context(digits)):
            ref = Decimal(z).exp()
        got = mittag_leffler(1, z, precision=precision).value.value
        report.add(f"E_1(z) = exp(z) z={z}", _rel(got, ref), REL_MU1)


# -- the other suites ------------------------------------------------------------


def _suite_normalization(report: CheckReport, mus: list[MuParam], precision: int) -> None:
    for mu in mus:
        for x in ("0.5", "1", "5"):
            table = adaptive_pmf_table(PmfParams(mu, x, 1), tail_tol=NORMALIZATION_TOL, precision=precision)
            with decimal.localcontext(working_context(precision)):
                deficit = max(Decimal(0), 1 - table.total)
            report.add(f"mu={mu} x={x} 1 - sum (n_max={table.n_max})", deficit, NORMALIZATION_TOL)


def _suite_genfun(report: CheckReport, mus: list[MuParam], precision: int) -> None:
    for mu in mus:
        ctx = BellEvalContext.build(mu, 12, precision)
        for x in ("0.5", "1", "2"):
            gf = verify_bell_gf(mu, x, 10, ctx, GF_TOL)
            worst = max(e.abs_diff for e in gf.entries)
            report.add(f"bell gf mu={mu} x={x} M=10", worst, GF_TOL)
        mismatches = 0
        for s in ("-0.7", "0.25", "1.5"):
            for x in ("0.5", "3"):
                a = gf_bell_poly(mu, s, x, precision)
                b = gf_stirling_bivariate(mu, s, x, precision)
                mismatches += (a.value, a.err_bound) != (b.value, b.err_bound)
        report.add(f"bivariate identity mu={mu} (bitwise)", Decimal(mismatches), Decimal(0))


def _suite_stirling_gf(report: CheckReport, mus: list[MuParam], precision: int) -> None:
    for mu in mus:
        for l in range(7):
            gf = verify_stirling_gf(mu, l, 12, GF_TOL, precision)
            worst = max(e.abs_diff for e in gf.entries)
            zeros_ok = all(e.exact_zero for e in gf.entries if e.m < l)
            report.add(f"stirling gf mu={mu} l={l} M=12", worst if zeros_ok else Decimal(1), GF_TOL,
                       "" if zeros_ok else "nonzero entry below the diagonal")


def _suite_dualpath(report: CheckReport, mus: list[MuParam], precision: int) -> None:
    for mu in mus:
        ctx = BellEvalContext.build(mu, 8, precision)
        for x in DUALPATH_X:
            worst = Decimal(0)
            outside = 0
            for m in range(9):
                a = bell_poly(ctx, x, m)
                b = bell_poly_series(mu, x, m, DUALPATH_TARGET, precision).value
                with decimal.localcontext(working_context(precision + 20)):
                    d = abs(a.value - b.value)
                worst = max(worst, d)
                outside += d > a.err_bound + b.err_bound
            report.add(f"mu={mu} x={x} m<=8 |finite - series|", worst if not outside else Decimal(1),
                       DUALPATH_ABS, f"{outside} outside the combined error bounds" if outside else "")


def _suite_moments(report: CheckReport, mus: list[MuParam], precision: int) -> None:
    n_max = 200
    for mu in mus:
        ctx = BellEvalContext.build(mu, 4, precision)
        for x in ("0.5", "1", "2"):
            params = PmfParams(mu, x, 1)
            table = pmf_table(params, n_max, precision=precision)
            for m in range(1, 5):
                with decimal.localcontext(working_context(precision + 20)):
                    partial = sum((n**m * p.value for n, p in enumerate(table.masses)), Decimal(0))
                    errs = sum((n**m * p.err_bound for n, p in enumerate(table.masses)), Decimal(0))
                    exact = moment(params, m, ctx)
                    diff = abs(partial - exact.value)
                    tol = table.tail_bound * n_max**m + errs + exact.err_bound
                report.add(f"mu={mu} x={x} m={m} sum n^m P(n) vs moment", diff, tol)


def run_suite(suite: str, mus=None, precision: int = DEFAULT_DIGITS) -> CheckReport:
    """Run one named suite over the given orders (default 0.25, 0.5, 0.75, 1)."""
    if suite not in SUITES:
        raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    mu_list = [as_mu(m) for m in (mus or DEFAULT_MUS)]
    if suite == "mu1":
        mu_list = [as_mu(1)]
    report = CheckReport(suite, tuple(str(m) for m in mu_list))
    start = time.perf_counter()
    if suite == "mu1":
        _suite_mu1(report, precision)
    elif suite == "normalization":
        _suite_normalization(report, mu_list, precision)
    elif suite == "genfun":
        _suite_genfun(report, mu_list, precision)
    elif suite == "stirling-gf":
        _suite_stirling_gf(report, mu_list, precision)
    elif suite == "dualpath":
        _suite_dualpath(report, mu_list, precision)
    else:
        _suite_moments(report, mu_list, precision)
    report.elapsed = time.perf_counter() - start
    return report
