import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from tmrvote.voters import VoterId, build_voter  # noqa: E402


@pytest.fixture(scope="session")
def voters():
    return {v: build_voter(v) for v in VoterId}


@pytest.fixture(scope="session")
def data_dir():
    return os.path.join(os.path.dirname(__file__), "..", "src", "tmrvote", "data")


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    prev = _criteria.get(number, (title, True))
    _criteria[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  AC{number:<2} {title}")
