import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> {"title", "ok" (None until a test ran), "lines"}
_CRITERIA = {}
_BY_NODE = {}


def _entry(number):
    return _CRITERIA.setdefault(number, {"title": "", "ok": None, "lines": []})


def record(number, line):
    """Attach one line of measured values to a criterion's summary."""
    _entry(number)["lines"].append(line)


def pytest_itemcollected(item):
    for mark in item.iter_markers("criterion"):
        number, title = mark.args
        _entry(number)["title"] = title
        _BY_NODE.setdefault(item.nodeid, []).append(number)


def pytest_runtest_logreport(report):
    numbers = _BY_NODE.get(report.nodeid)
    if not numbers:
        return
    if report.when == "call" or report.failed or report.skipped:
        for number in numbers:
            e = _entry(number)
            passed = report.passed and not report.skipped
            e["ok"] = passed if e["ok"] is None else (e["ok"] and passed)


def pytest_terminal_summary(terminalreporter):
    ran = {k: v for k, v in _CRITERIA.items() if v["ok"] is not None}
    if not ran:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ran):
        e = ran[number]
        tr.write_line(f"criterion {number} [{e['title']}]: {'PASS' if e['ok'] else 'FAIL'}")
        for line in e["lines"]:
            tr.write_line(f"    {line}")
