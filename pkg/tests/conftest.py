import numpy as np
import pytest

from twospecies import initial
from twospecies.measures import GridDensity


@pytest.fixture
def uniform_unit():
    """Density 1 on [0, 1]."""
    return GridDensity(0.01, np.ones(101))


@pytest.fixture
def tent_pair():
    return initial.tent(1e-3)


def brute_cdf_gap(a, b, fine=1e-4, upper=1.2):
    """sup |F_a - F_b| sampled on a fine grid plus both sides of every knot."""
    x = np.arange(0.0, upper + fine, fine)
    knots = np.union1d(a.knots(), b.knots())
    x = np.union1d(x, np.concatenate([knots, np.clip(knots - 1e-12, 0, None)]))
    return float(np.max(np.abs(a.cdf(x) - b.cdf(x))))


_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1].removeprefix("test_")
        detail = dict(report.user_properties).get("detail", "")
        _ACCEPTANCE[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{status} {name}: {detail}")
