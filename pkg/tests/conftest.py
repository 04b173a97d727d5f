import os
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from gyropencil import fixtures, sturm
from gyropencil.pencil import spectrum

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")

ACCEPTANCE_LINES = []


def record_acceptance(k, name, ok):
    line = "ACCEPTANCE %d: %s: %s" % (k, name, "PASS" if ok else "FAIL")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixture_dir():
    return os.path.abspath(FIXTURE_DIR)


@pytest.fixture(scope="session")
def double300():
    """The n=300 joined-string run, solved once and shared.

    The solve costs a few seconds; every consumer reads the same
    SpectrumResult.  The elapsed solve time is part of the value so the
    runtime budget can be charged where the work happened.
    """
    prob = fixtures.sl_double_q4()
    t0 = time.monotonic()
    spec = sturm.discretize(prob)
    result = spectrum(spec, 1.0)
    elapsed = time.monotonic() - t0
    return spec, result, elapsed
