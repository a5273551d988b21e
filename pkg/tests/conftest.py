import collections

import pytest

_outcomes = collections.defaultdict(list)
_labels = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): acceptance criterion this test verifies")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, label = marker.args
    _labels[n] = label
    if report.when == "call" or report.failed or report.skipped:
        _outcomes[n].append((item.name, report.passed and report.when == "call"))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        results = _outcomes[n]
        ok = all(passed for _, passed in results)
        failed = [name for name, passed in results if not passed]
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {_labels[n]} ({len(results)} checks)"
        if failed:
            line += "; failing: " + ", ".join(failed)
        terminalreporter.write_line(line)
