"""Command-line interface: ``frackell <command> [options]``.

Exit codes: 0 success, 2 usage or domain error, 3 numerical
non-convergence, 4 failed check suite.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import sys
from decimal import Decimal

from . import __version__
from .bell import BellEvalContext, bell_number, bell_poly
from .checks import SUITES, run_suite
from .errors import CapacityError, ContractError, DomainError, NonConvergenceError, RangeError
from .mittag_leffler import mittag_leffler
from .poisson import PmfParams, pmf_table
from .precision import DEFAULT_DIGITS, DEFAULT_TARGET, MIN_DIGITS, as_mu, to_decimal
from .sampler import RNG_ALGORITHM, empirical_moments, moment_standard_errors, sample_counts
from .stirling import build_triangle

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGENCE, EXIT_CHECK_FAILED = 0, 2, 3, 4
DIGITS_ENV = "FRACKELL_DIGITS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _s(v) -> str:
    return str(v)


# -- output --------------------------------------------------------------------


class Envelope:
    """Metadata plus a payload; rendered as JSON or as CSV with '#' metadata lines."""

    def __init__(self, command: str, metadata: dict, payload: dict, header: list[str], rows: list[list]):
        self.command = command
        self.metadata = metadata
        self.payload = payload
        self.header = header
        self.rows = rows

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps({"metadata": self.metadata, "payload": self.payload}, indent=2) + "\n"
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}: {v if isinstance(v, str) else json.dumps(v)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()


def _metadata(args, mu, precision: int, params: dict, **extra) -> dict:
    meta = {
        "tool": "frackell",
        "version": __version__,
        "command": args.command,
        "argv": " ".join(args.argv),
        "mu": None if mu is None else str(mu),
        "precision": precision,
        "params": params,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    meta.update(extra)
    return meta


# -- commands --------------------------------------------------------------------


def cmd_ml(args, digits: int) -> tuple[Envelope, int]:
    res = mittag_leffler(args.mu, args.z, args.derivative, target_rel_err=args.target, precision=digits)
    mu = as_mu(args.mu)
    params = {"z": str(to_decimal(args.z)), "derivative": args.derivative, "target_rel_err": str(args.target)}
    payload = {
        "value": _s(res.value.value),
        "err_bound": _s(res.err_bound),
        "terms_used": res.terms_used,
        "cancellation_digits": f"{res.cancellation_digits:.2f}",
    }
    row = [payload["value"], payload["err_bound"], res.terms_used, payload["cancellation_digits"]]
    env = Envelope("ml", _metadata(args, mu, digits, params), payload,
                   ["value", "err_bound", "terms_used", "cancellation_digits"], [row])
    return env, EXIT_OK


def cmd_stirling(args, digits: int) -> tuple[Envelope, int]:
    if args.mu is None and not args.exact:
        raise UsageError("stirling: --mu is required unless --exact is given")
    tri = build_triangle(args.max_m)
    M = args.max_m
    header = ["m"] + [f"l={l}" for l in range(1, M + 1)]
    mu = None if args.mu is None else as_mu(args.mu)
    params = {"max_m": M, "exact": args.exact}
    if args.exact:
        rows_json = [{"m": m, "entries": [str(tri[m, l]) for l in range(1, m + 1)]} for m in range(1, M + 1)]
        payload = {"kind": "numerators", "denominator": "Gamma(mu*l+1)", "rows": rows_json}
        rows = [[m] + r["entries"] + [""] * (M - m) for m, r in zip(range(1, M + 1), rows_json)]
    else:
        evaluated = tri.evaluate(mu, digits)
        rows_json = [
            {
                "m": m,
                "values": [_s(evaluated[m][l].value) for l in range(1, m + 1)],
                "err_bounds": [_s(evaluated[m][l].err_bound) for l in range(1, m + 1)],
            }
            for m in range(1, M + 1)
        ]
        payload = {"kind": "values", "rows": rows_json}
        rows = [[r["m"]] + r["values"] + [""] * (M - r["m"]) for r in rows_json]
    return Envelope("stirling", _metadata(args, mu, digits, params), payload, header, rows), EXIT_OK


def _bell_rows(values) -> tuple[list[dict], list[list]]:
    js = [{"m": m, "value": _s(v.value), "err_bound": _s(v.err_bound)} for m, v in enumerate(values)]
    return js, [[r["m"], r["value"], r["err_bound"]] for r in js]


def cmd_bell(args, digits: int) -> tuple[Envelope, int]:
    mu = as_mu(args.mu)
    ctx = BellEvalContext.build(mu, max(1, args.max_m), digits)
    values = [bell_poly(ctx, args.x, m) for m in range(args.max_m + 1)]
    js, rows = _bell_rows(values)
    params = {"x": str(to_decimal(args.x)), "max_m": args.max_m}
    return Envelope("bell", _metadata(args, mu, digits, params), {"rows": js}, ["m", "value", "err_bound"], rows), EXIT_OK


def cmd_bell_numbers(args, digits: int) -> tuple[Envelope, int]:
    mu = as_mu(args.mu)
    ctx = BellEvalContext.build(mu, max(1, args.max_m), digits)
    values = [bell_number(ctx, m) for m in range(args.max_m + 1)]
    js, rows = _bell_rows(values)
    params = {"max_m": args.max_m}
    return Envelope("bell-numbers", _metadata(args, mu, digits, params), {"rows": js}, ["m", "value", "err_bound"], rows), EXIT_OK


def cmd_pmf(args, digits: int) -> tuple[Envelope, int]:
    params = PmfParams(args.mu, args.nu, args.t)
    table = pmf_table(params, args.max_n, target_rel_err=args.target, precision=digits)
    js = [{"n": n, "mass": _s(m.value), "err_bound": _s(m.err_bound)} for n, m in enumerate(table.masses)]
    payload = {"masses": js, "tail_bound": _s(table.tail_bound)}
    meta = _metadata(
        args, params.mu, digits,
        {"nu": str(params.nu), "t": str(params.t), "x": _s(params.x(digits)), "max_n": args.max_n,
         "target_rel_err": str(args.target)},
        tail_bound=_s(table.tail_bound),
    )
    rows = [[r["n"], r["mass"], r["err_bound"]] for r in js]
    return Envelope("pmf", meta, payload, ["n", "mass", "err_bound"], rows), EXIT_OK


def cmd_check(args, digits: int) -> tuple[Envelope, int]:
    report = run_suite(args.suite, args.mu, digits)
    js = [
        {"name": r.name, "passed": r.passed, "measured": _s(r.measured), "tolerance": _s(r.tolerance), "detail": r.detail}
        for r in report.results
    ]
    payload = {"suite": report.suite, "passed": report.passed, "checks": js}
    meta = _metadata(args, ",".join(report.mus), digits, {"suite": args.suite, "mus": list(report.mus)},
                     elapsed_seconds=f"{report.elapsed:.2f}")
    rows = [[r["name"], "PASS" if r["passed"] else "FAIL", r["measured"], r["tolerance"], r["detail"]] for r in js]
    env = Envelope("check", meta, payload, ["check", "status", "measured", "tolerance", "detail"], rows)
    return env, EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_sample(args, digits: int) -> tuple[Envelope, int]:
    params = PmfParams(args.mu, args.nu, args.t)
    run = sample_counts(params, args.count, args.seed, args.n_max, args.workers)
    freq = run.frequencies
    payload = {
        "count": run.count,
        "seed": run.seed,
        "n_max": run.table.n_max,
        "tail_bound": _s(run.table.tail_bound),
        "frequencies": [int(c) for c in freq],
    }
    rows = [["frequency", n, int(c), ""] for n, c in enumerate(freq)]
    if args.moments is not None:
        moms = empirical_moments(run, args.moments, digits)
        ses = moment_standard_errors(run, args.moments)
        payload["moments"] = [
            {"m": m, "value": _s(v.value), "standard_error": repr(se)} for m, (v, se) in enumerate(zip(moms, ses))
        ]
        rows += [["moment", m, _s(v.value), repr(se)] for m, (v, se) in enumerate(zip(moms, ses))]
    meta = _metadata(
        args, params.mu, digits,
        {"nu": str(params.nu), "t": str(params.t), "count": args.count, "seed": args.seed,
         "n_max": args.n_max, "workers": args.workers, "moments": args.moments},
        rng=RNG_ALGORITHM,
    )
    return Envelope("sample", meta, payload, ["kind", "index", "value", "standard_error"], rows), EXIT_OK


# -- parser ------------------------------------------------------------------------


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _real(text: str) -> Decimal:
    try:
        return to_decimal(text)
    except (DomainError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frackell", description="Fractional Bell, Stirling and Poisson computations.")
    parser.add_argument("--version", action="version", version=f"frackell {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--digits", type=int, help=f"significant digits (default ${DIGITS_ENV} or {DEFAULT_DIGITS})")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        return p

    p = add("ml", cmd_ml, "Mittag-Leffler function or derivative")
    p.add_argument("--mu", type=_real, required=True)
    p.add_argument("--z", type=_real, required=True)
    p.add_argument("--derivative", type=_nonneg_int, default=0)
    p.add_argument("--target", type=_real, default=DEFAULT_TARGET)

    p = add("stirling", cmd_stirling, "fractional Stirling triangle")
    p.add_argument("--mu", type=_real)
    p.add_argument("--max-m", type=_nonneg_int, required=True)
    p.add_argument("--exact", action="store_true", help="integer numerators over Gamma(mu*l+1)")

    p = add("bell", cmd_bell, "fractional Bell polynomials B_mu(x, m), m = 0..max-m")
    p.add_argument("--mu", type=_real, required=True)
    p.add_argument("--x", type=_real, required=True)
    p.add_argument("--max-m", type=_nonneg_int, required=True)

    p = add("bell-numbers", cmd_bell_numbers, "fractional Bell numbers B_mu(m), m = 0..max-m")
    p.add_argument("--mu", type=_real, required=True)
    p.add_argument("--max-m", type=_nonneg_int, required=True)

    p = add("pmf", cmd_pmf, "fractional Poisson probabilities P_mu(n, t), n = 0..max-n")
    p.add_argument("--mu", type=_real, required=True)
    p.add_argument("--nu", type=_real, required=True)
    p.add_argument("--t", type=_real, required=True)
    p.add_argument("--max-n", type=_nonneg_int, required=True)
    p.add_argument("--target", type=_real, default=DEFAULT_TARGET)

    p = add("check", cmd_check, "run a verification suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--mu", type=_real, action="append", help="order to check (repeatable)")

    p = add("sample", cmd_sample, "Monte Carlo event counts")
    p.add_argument("--mu", type=_real, required=True)
    p.add_argument("--nu", type=_real, required=True)
    p.add_argument("--t", type=_real, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--moments", type=_nonneg_int)
    p.add_argument("--n-max", type=_nonneg_int)
    p.add_argument("--workers", type=int, default=1)
    return parser


def _resolve_digits(flag: int | None) -> int:
    if flag is not None:
        digits = flag
    else:
        env = os.environ.get(DIGITS_ENV)
        if env is None or env.strip() == "":
            return DEFAULT_DIGITS
        try:
            digits = int(env)
        except ValueError:
            raise UsageError(f"{DIGITS_ENV}={env!r} is not an integer")
    if digits < MIN_DIGITS:
        raise UsageError(f"digits must be at least {MIN_DIGITS}, got {digits}")
    return digits


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        digits = _resolve_digits(args.digits)
        env, code = args.func(args, digits)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, CapacityError, ContractError) as exc:
        print(f"frackell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergenceError, RangeError) as exc:
        print(f"frackell: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    sys.stdout.write(env.render(args.format))
    return code
