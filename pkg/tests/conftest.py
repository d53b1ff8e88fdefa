"""Collects acceptance-criterion outcomes and prints one line per criterion."""

from __future__ import annotations

_outcomes: dict[int, dict] = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    number, title = mark.args
    entry = _outcomes.setdefault(number, {"title": title, "passed": True, "tests": 0})
    entry["tests"] += 1
    if call.excinfo is not None:
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        e = _outcomes[number]
        status = "PASS" if e["passed"] else "FAIL"
        terminalreporter.write_line(f"criterion {number} [{status}] {e['title']} ({e['tests']} tests)")
