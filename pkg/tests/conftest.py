import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_AC_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test belongs to acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    n = mark.args[0]
    if rep.when == "call" or rep.failed:
        ok = rep.passed and _AC_RESULTS.get(n, True)
        _AC_RESULTS[n] = ok


def pytest_terminal_summary(terminalreporter):
    if not _AC_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_AC_RESULTS):
        terminalreporter.write_line(f"AC{n} {'PASS' if _AC_RESULTS[n] else 'FAIL'}")
