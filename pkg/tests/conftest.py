"""Collects acceptance-criterion outcomes and prints them as a summary block."""

import pytest

_OUTCOMES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion implemented by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    key = (number, title)
    failed = report.failed or (report.when == "call" and report.skipped)
    if failed:
        _OUTCOMES[key] = ("FAIL", item.nodeid)
    elif report.when == "call" and key not in _OUTCOMES:
        _OUTCOMES[key] = ("PASS", item.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), (status, _) in sorted(_OUTCOMES.items()):
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
