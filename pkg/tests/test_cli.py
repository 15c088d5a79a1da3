import csv
import io
import json
import subprocess
import sys
from decimal import Decimal

import pytest

from frackell import cli
from frackell.checks import CheckReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def as_json(out):
    doc = json.loads(out)
    assert set(doc) == {"metadata", "payload"}
    return doc


def csv_rows(out):
    lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def test_ml_exp(capsys):
    code, out, _ = run(capsys, "ml", "--mu", "1", "--z", "1", "--digits", "30")
    doc = as_json(out)
    assert code == 0
    assert doc["payload"]["value"].startswith("2.71828182845904523536028747135")
    assert isinstance(doc["payload"]["err_bound"], str)
    meta = doc["metadata"]
    assert meta["command"] == "ml" and meta["precision"] == 30 and meta["mu"] == "1"


def test_ml_derivative_at_zero(capsys):
    _, out, _ = run(capsys, "ml", "--mu", "0.5", "--z", "0", "--derivative", "2")
    assert Decimal(as_json(out)["payload"]["value"]) == 2


def test_stirling_exact_csv(capsys):
    code, out, _ = run(capsys, "stirling", "--exact", "--max-m", "6", "--format", "csv")
    rows = csv_rows(out)
    assert code == 0
    assert rows[0] == ["m", "l=1", "l=2", "l=3", "l=4", "l=5", "l=6"]
    assert rows[6] == ["6", "1", "62", "540", "1560", "1800", "720"]
    # empty cells above the diagonal
    assert rows[2] == ["2", "1", "2", "", "", "", ""]


def test_stirling_values_order_one(capsys):
    _, out, _ = run(capsys, "stirling", "--mu", "1", "--max-m", "4")
    rows = as_json(out)["payload"]["rows"]
    assert [Decimal(v) for v in rows[3]["values"]] == [1, 7, 6, 1]


def test_stirling_needs_mu_without_exact(capsys):
    code, _, err = run(capsys, "stirling", "--max-m", "4")
    assert code == 2 and "--mu" in err


def test_bell_numbers(capsys):
    _, out, _ = run(capsys, "bell-numbers", "--mu", "1", "--max-m", "6", "--format", "csv")
    assert [Decimal(r[1]) for r in csv_rows(out)[1:]] == [1, 1, 2, 5, 15, 52, 203]


def test_bell(capsys):
    _, out, _ = run(capsys, "bell", "--mu", "0.5", "--x", "1", "--max-m", "2")
    rows = as_json(out)["payload"]["rows"]
    assert rows[1]["value"].startswith("1.12837916709551257389615890312")


def test_pmf(capsys):
    code, out, _ = run(capsys, "pmf", "--mu", "1", "--nu", "2", "--t", "1", "--max-n", "3")
    doc = as_json(out)
    masses = [Decimal(m["mass"]) for m in doc["payload"]["masses"]]
    assert code == 0
    assert abs(masses[2] - Decimal("0.2706705664732254")) < Decimal("1e-15")
    assert "tail_bound" in doc["metadata"]


def test_sample_reproducible(capsys):
    args = ("sample", "--mu", "0.5", "--nu", "1", "--t", "1", "--count", "2000", "--seed", "9", "--moments", "2")
    a = as_json(run(capsys, *args)[1])
    b = as_json(run(capsys, *args)[1])
    for doc in (a, b):
        doc["metadata"].pop("timestamp")
    assert a == b
    assert sum(a["payload"]["frequencies"]) == 2000
    assert "PCG64" in a["metadata"]["rng"]


def test_sample_csv_header(capsys):
    _, out, _ = run(capsys, "sample", "--mu", "1", "--nu", "1", "--t", "1", "--count", "10", "--seed", "1",
                    "--format", "csv")
    assert csv_rows(out)[0] == ["kind", "index", "value", "standard_error"]


def test_csv_metadata_lines(capsys):
    _, out, _ = run(capsys, "ml", "--mu", "0.5", "--z", "1", "--format", "csv")
    meta = [ln for ln in out.splitlines() if ln.startswith("# ")]
    keys = {ln[2:].split(":", 1)[0] for ln in meta}
    assert {"tool", "version", "command", "precision", "timestamp"} <= keys


def test_env_digits_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("FRACKELL_DIGITS", "25")
    assert as_json(run(capsys, "ml", "--mu", "1", "--z", "1")[1])["metadata"]["precision"] == 25
    assert as_json(run(capsys, "ml", "--mu", "1", "--z", "1", "--digits", "40")[1])["metadata"]["precision"] == 40
    monkeypatch.setenv("FRACKELL_DIGITS", "many")
    assert run(capsys, "ml", "--mu", "1", "--z", "1")[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("ml", "--mu", "1.5", "--z", "1"),
        ("ml", "--mu", "0.5"),
        ("ml", "--mu", "abc", "--z", "1"),
        ("ml", "--mu", "0.5", "--z", "1", "--digits", "5"),
        ("pmf", "--mu", "0.5", "--nu", "1", "--t", "1", "--max-n", "500"),
        ("bogus",),
        ("check", "--suite", "nope"),
    ],
)
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


def test_nonconvergence_exit_code(capsys):
    code, _, err = run(capsys, "ml", "--mu", "0.1", "--z", "-60")
    assert code == 3 and "terms" in err


def test_check_pass_and_fail(capsys, monkeypatch):
    code, out, _ = run(capsys, "check", "--suite", "stirling-gf", "--mu", "0.5")
    assert code == 0 and as_json(out)["payload"]["passed"] is True

    def failing(suite, mus=None, precision=50):
        report = CheckReport(suite, ("0.5",))
        report.add("forced", Decimal(1), Decimal(0))
        return report

    monkeypatch.setattr(cli, "run_suite", failing)
    code, out, _ = run(capsys, "check", "--suite", "mu1", "--format", "csv")
    assert code == 4
    assert csv_rows(out)[1][:2] == ["forced", "FAIL"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "frackell", "stirling", "--exact", "--max-m", "3", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "3,1,6,6"
