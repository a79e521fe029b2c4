import re
import warnings

import pytest

from fivevertex.model import LatticeSpec


@pytest.fixture
def s123():
    return LatticeSpec(1, 2, 3)


@pytest.fixture
def s245():
    return LatticeSpec(2, 4, 5)


@pytest.fixture(autouse=True)
def _quiet_monotonicity():
    from fivevertex.sampler import MonotonicityWarning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MonotonicityWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")

    def order(key):
        m = re.match(r"(\d+)", key)
        return (int(m.group(1)) if m else 99, key)

    for key in sorted(RESULTS, key=order):
        verdict, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key:<24} {verdict:<26} {detail}")
