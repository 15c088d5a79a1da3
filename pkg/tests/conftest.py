import mpmath
import pytest

from oracles import ORACLE_DPS


@pytest.fixture(autouse=True)
def _mp_precision():
    # mpmath's global default is 15 digits; comparisons need far more
    with mpmath.workdps(ORACLE_DPS):
        yield


def mp(v):
    """Decimal/PrecReal/str -> mpf without a binary round-trip."""
    return mpmath.mpf(str(getattr(v, "value", v)))


# lines recorded by test_acceptance.py, one per criterion
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
