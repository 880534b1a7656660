import random

import pytest

import treepressure
from treepressure import asymptotics, transfer
from treepressure.restriction import RestrictionMatrix, is_strongly_connected, period

# -- every pressure series computed anywhere in the suite is checked against the
#    pre-limit upper estimate as it is produced

BOUND_TOL = 1e-10
SERIES_CHECKED = []
_original_series = transfer.pressure_series


def check_upper_estimate(series):
    for rec, bound in zip(series.records, asymptotics.finite_upper_bounds(series)):
        assert rec.P <= bound + BOUND_TOL, (rec.n, rec.P, bound)


def _recording_series(*args, **kwargs):
    series = _original_series(*args, **kwargs)
    check_upper_estimate(series)
    SERIES_CHECKED.append((str(series.R), series.n_max, series.mode, series.backend))
    return series


transfer.pressure_series = _recording_series
asymptotics.pressure_series = _recording_series
treepressure.pressure_series = _recording_series


# -- acceptance summary lines

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    terminalreporter.write_line(f"pressure series checked against the upper estimate: {len(SERIES_CHECKED)}")


@pytest.fixture
def report():
    def _report(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        print(ACCEPTANCE_LINES[-1])
        assert ok, f"{name}: {detail}"

    return _report


# -- shared generators


def random_irreducible_periodic(rng: random.Random, k_max: int = 6) -> RestrictionMatrix:
    """Irreducible 0/1 matrix with period > 1: edges only run from class c to c+1 mod p."""
    while True:
        k = rng.randint(2, k_max)
        p = rng.randint(2, min(k, 3))
        cls = [i % p for i in range(k)]
        rng.shuffle(cls)
        rows = [[int(cls[j] == (cls[i] + 1) % p and rng.random() < 0.6) for j in range(k)] for i in range(k)]
        R = RestrictionMatrix.from_rows(rows)
        if is_strongly_connected(R) and period(R) > 1:
            return R


def random_irreducible(rng: random.Random, k: int, density: float = 0.5) -> RestrictionMatrix:
    while True:
        rows = [[int(rng.random() < density) for _ in range(k)] for _ in range(k)]
        R = RestrictionMatrix.from_rows(rows)
        if is_strongly_connected(R):
            return R


def rel_close(a, b, rtol):
    if a == b:
        return True
    return abs(a - b) <= rtol * max(abs(b), 1.0)

