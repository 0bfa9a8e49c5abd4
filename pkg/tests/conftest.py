import math

import mpmath
import pytest

from easb.data import load_fixture

mpmath.mp.dps = 50


def mp_entropy(counts_or_probs):
    """High-precision normalized entropy, independent of the package code."""
    vals = [mpmath.mpf(v) for v in counts_or_probs]
    total = sum(vals)
    k = len(vals)
    if k == 1:
        return 0.0
    h = mpmath.mpf(0)
    for v in vals:
        if v > 0:
            p = v / total
            h -= p * mpmath.log(p, 2)
    return float(h / mpmath.log(k, 2))


def tally(rows, n_classes, key):
    counts = [0] * n_classes
    for r in rows:
        counts[key(r)] += 1
    return counts


@pytest.fixture(scope="session")
def scenario1():
    return load_fixture("scenario1")


@pytest.fixture(scope="session")
def scenario2():
    return load_fixture("scenario2")


def close(a, b, tol):
    return math.isclose(a, b, rel_tol=0, abs_tol=tol)


ACCEPTANCE_LINES = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
