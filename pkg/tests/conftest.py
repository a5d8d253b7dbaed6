"""Shared fixtures plus the acceptance criteria report.

Tests marked @pytest.mark.acceptance("A1", "...") feed a one-line
PASS/FAIL summary per criterion at the end of the run.
"""

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(cid, desc): top-level acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    cid, desc = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        previous = _RESULTS.get(cid)
        failed = rep.outcome != "passed" or (previous and previous[1] != "passed")
        _RESULTS[cid] = (desc, "failed" if failed else "passed")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_RESULTS):
        desc, outcome = _RESULTS[cid]
        word = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{word}] {cid}: {desc}")
