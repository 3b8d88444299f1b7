"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line per criterion."""

import pytest

_results: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _results.setdefault(number, {"title": title, "failed": [], "seen": 0})
    if report.when == "call" or (report.when == "setup" and not report.passed):
        entry["seen"] += 1
        if not report.passed or hasattr(report, "wasxfail"):
            entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        entry = _results[number]
        verdict = "FAIL" if entry["failed"] or not entry["seen"] else "PASS"
        line = f"criterion {number} ({entry['title']}): {verdict}"
        if entry["failed"]:
            line += f"  [failing parts: {', '.join(entry['failed'])}]"
        terminalreporter.write_line(line)
