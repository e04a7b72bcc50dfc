import numpy as np
import pytest

from spin_eraser.analytic import screen_grid
from spin_eraser.core import DEFAULT_PARAMS, GridSpec

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion this test checks")
    config.addinivalue_line("markers", "slow: long-running oracle propagation")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = dict(report.user_properties).get("criterion")
    if marker is None:
        return
    n, text = marker
    ok = report.outcome == "passed"
    prev = _criteria.get(n)
    _criteria[n] = (text, (prev[1] if prev else True) and ok,
                    (prev[2] if prev else []) + [report.nodeid.split("::")[-1]] * (not ok))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        text, ok, failed = _criteria[n]
        line = f"criterion {n:>2}  {'PASS' if ok else 'FAIL'}  {text}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        tr.write_line(line)


@pytest.fixture(autouse=True)
def _record_criterion(request):
    marker = request.node.get_closest_marker("criterion")
    if marker is not None:
        request.node.user_properties.append(("criterion", tuple(marker.args)))


@pytest.fixture
def params():
    return DEFAULT_PARAMS


@pytest.fixture
def grid(params):
    return screen_grid(params)


@pytest.fixture
def small_grid(params):
    return screen_grid(params, nx=256, nz=256)


def quad2d(values, g: GridSpec) -> float:
    """Plain trapezoid rule, independent of DensityField.integral."""
    return float(np.trapezoid(np.trapezoid(values, g.z, axis=1), g.x))
