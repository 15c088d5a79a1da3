"""Acceptance criteria, one test each, with their runtime limits.

Every test records a line in ``ACCEPTANCE``; conftest prints them after the
run, so ``pytest tests/test_acceptance.py`` always ends with one PASS/FAIL
line per criterion.
"""
import csv
import io
import time
from decimal import Decimal

import mpmath
import numpy as np
import pytest

from conftest import ACCEPTANCE, mp
from frackell import cli
from frackell.bell import BellEvalContext, bell_poly
from frackell.checks import run_suite
from frackell.mittag_leffler import MLRequest, ml_eval
from frackell.poisson import PmfParams
from frackell.sampler import empirical_moments, moment_standard_errors, sample_counts
from frackell.stirling import build_triangle, classic_stirling_triangle
from oracles import ml_half, stirling2_recurrence

ALL_MUS = ["0.25", "0.5", "0.75", "1"]

# numerators of the fractional Stirling table, rows m = 1..6
NUMERATORS_M6 = [
    [1],
    [1, 2],
    [1, 6, 6],
    [1, 14, 36, 24],
    [1, 30, 150, 240, 120],
    [1, 62, 540, 1560, 1800, 720],
]


class Criterion:
    def __init__(self, number: int, title: str, limit: float):
        self.number, self.title, self.limit = number, title, limit
        self.detail = ""

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.limit
        why = self.detail if exc_type is None else f"{exc_type.__name__}: {exc}"
        line = f"criterion {self.number} {'PASS' if ok else 'FAIL'} {self.title} ({elapsed:.2f}s of {self.limit:g}s) {why}".rstrip()
        ACCEPTANCE.append(line)
        print(line)
        if exc_type is None:
            assert elapsed < self.limit, line
        return False


def test_c1_table_one(capsys):
    with Criterion(1, "Stirling table golden values", 1.0) as c:
        code = cli.main(["stirling", "--exact", "--max-m", "6", "--format", "csv"])
        out = capsys.readouterr().out
        rows = list(csv.reader(io.StringIO("\n".join(ln for ln in out.splitlines() if not ln.startswith("#")))))
        assert code == 0
        got = [[int(v) for v in row[1:] if v != ""] for row in rows[1:]]
        assert got == NUMERATORS_M6
        assert sum(len(r) for r in got) == 21
        c.detail = "21/21 numerators exact"


def test_c2_numerators_against_recurrence():
    with Criterion(2, "c(m,l) = l! S(m,l), m <= 60", 10.0) as c:
        tri = build_triangle(60)
        ref = stirling2_recurrence(60)
        classic = classic_stirling_triangle(60)
        checked = 0
        for m in range(61):
            for l in range(m + 1):
                f = 1
                for i in range(2, l + 1):
                    f *= i
                assert tri[m, l] == f * ref[m][l] == f * classic[m][l]
                checked += 1
        c.detail = f"{checked} entries exact"


def _suite(number, title, limit, suite, mus=None):
    with Criterion(number, title, limit) as c:
        report = run_suite(suite, mus, 50)
        worst = [(r.name, str(r.measured), str(r.tolerance)) for r in report.failures]
        assert report.passed, worst
        c.detail = f"{len(report.results)} checks"
    return report


def test_c3_order_one_reductions():
    report = _suite(3, "mu = 1 reductions", 30.0, "mu1")
    names = " ".join(r.name for r in report.results)
    assert "lambda=10" in names and "x=5" in names and "gf bell numbers" in names


def test_c4_normalization():
    report = _suite(4, "normalization with adaptive n_max", 60.0, "normalization", ALL_MUS)
    assert len(report.results) == 12


def test_c5_dual_path():
    report = _suite(5, "dual-path Bell equivalence", 60.0, "dualpath", ALL_MUS)
    assert len(report.results) == 20
    assert all(r.tolerance == Decimal("1e-20") for r in report.results)


def test_c6_generating_functions():
    with Criterion(6, "generating-function coefficients", 30.0) as c:
        n = 0
        for suite in ("genfun", "stirling-gf"):
            report = run_suite(suite, ALL_MUS, 50)
            assert report.passed, [(r.name, str(r.measured)) for r in report.failures]
            assert all(r.tolerance <= Decimal("1e-9") for r in report.results)
            n += len(report.results)
        c.detail = f"{n} checks"


def test_c7_mittag_leffler_erfc_oracle():
    with Criterion(7, "E_1/2 against the erfc oracle", 10.0) as c:
        worst = mpmath.mpf(0)
        for z in ("-3", "-1", "-0.5", "0.5", "1", "2"):
            r = ml_eval(MLRequest("0.5", z), 50)
            ref = ml_half(mpmath.mpf(z))
            worst = max(worst, abs(mp(r.value) - ref) / abs(ref))
        assert worst < mpmath.mpf(10) ** -25
        c.detail = f"worst relative error {mpmath.nstr(worst, 3)}"


def test_c8_monte_carlo_moments():
    with Criterion(8, "Monte Carlo moment concordance", 120.0) as c:
        summary = []
        for mu in ("0.5", "1"):
            params = PmfParams(mu, 1, 1)
            ctx = BellEvalContext.build(mu, 3, 30)
            exact = [float(bell_poly(ctx, params.x(), m).value) for m in range(4)]
            good = 0
            for seed in range(20):
                run = sample_counts(params, 100_000, seed)
                emp = empirical_moments(run, 3, 30)
                se = moment_standard_errors(run, 3)
                z = [abs(float(emp[m].value) - exact[m]) / se[m] for m in (1, 2, 3)]
                good += bool(np.all(np.array(z) <= 4))
            summary.append(f"mu={mu}: {good}/20 seeds")
            assert good >= 19, summary
        c.detail = ", ".join(summary)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
