from pathlib import Path

import pytest

from streamcore.model import StreamTrace
from streamcore.parser import parse_spec

SPECS = Path(__file__).resolve().parent.parent / "specs"

ACCEPTANCE_RESULTS: dict = {}


def load(name: str):
    return parse_spec((SPECS / name).read_text())


@pytest.fixture
def specs_dir() -> Path:
    return SPECS


@pytest.fixture
def async_trace() -> StreamTrace:
    # battery at {1,3,5}, temperature at {2,3,4}, horizon 6
    return StreamTrace(
        {
            "battery_level": (None, 95, None, 97, None, 99),
            "temperature": (None, None, 45, 55, 60, None),
        }
    )


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number = marker.args[0]
    ok = call.excinfo is None
    ACCEPTANCE_RESULTS[number] = ACCEPTANCE_RESULTS.get(number, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ACCEPTANCE_RESULTS[number] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
