import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_RESULTS: dict = {}
_NOTES: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.fixture
def note(request):
    """Attach a one-line measurement to the criterion summary."""
    def add(text):
        _NOTES.setdefault(request.node.nodeid, []).append(str(text))
    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    _RESULTS[number] = (title, rep.outcome, item.nodeid)
    status = "PASS" if rep.passed else "FAIL"
    detail = "; ".join(_NOTES.get(item.nodeid, []))
    line = f"criterion {number:>2} {status}: {title}" + (f" [{detail}]" if detail else "")
    reporter = item.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_line("")
        reporter.write_line(line)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, outcome, nodeid = _RESULTS[number]
        status = "PASS" if outcome == "passed" else "FAIL"
        detail = "; ".join(_NOTES.get(nodeid, []))
        terminalreporter.write_line(f"criterion {number:>2} {status}: {title}" + (f" [{detail}]" if detail else ""))
