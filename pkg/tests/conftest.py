import re

import numpy as np
import pytest

from horodual.lorentz import HPoint

_CRITERIA = {}
TITLES = {
    1: "sphere calibration", 2: "dual-metric identity", 3: "Weingarten inversion",
    4: "double duality", 5: "curvature identities (n = 3)", 6: "Gauss equation",
    7: "Codazzi", 8: "admissibility route cross-check", 9: "round trip",
    10: "conformal Gauss map", 11: "isometry equivariance", 12: "fixed horospheres",
    13: "de Sitter duality", 14: "envelope isometry", 15: "cone-model embedding",
}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def origin3():
    return HPoint.origin(3)


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_c(\d\d)_(\w+)", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call" or report.failed:
        name, prev, count = _CRITERIA.get(num, (TITLES.get(num, m.group(2)), "PASS", 0))
        status = "FAIL" if (report.failed or prev == "FAIL") else "PASS"
        _CRITERIA[num] = (name, status, count + (report.when == "call"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num, (name, status, count) in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"criterion {num:2d} {name:32s} {status} ({count} tests)")
