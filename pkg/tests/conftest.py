import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict = {}
_OUTCOMES: dict = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion this test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _CRITERIA[m.args[0]] = m.args[1]


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    m = _MARKS.get(report.nodeid)
    if m is None:
        return
    if hasattr(report, "wasxfail"):
        outcome = "expected-fail" if report.skipped else "failed"
    else:
        outcome = report.outcome
    _OUTCOMES[m].append((report.nodeid.split("::")[-1], outcome))


_MARKS: dict = {}


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m is not None:
        _MARKS[item.nodeid] = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        results = _OUTCOMES.get(n, [])
        ok = bool(results) and all(o == "passed" for _, o in results)
        status = "PASS" if ok else "FAIL"
        bad = [name for name, o in results if o != "passed"]
        extra = f"  (failing: {', '.join(bad)})" if bad else ""
        tr.write_line(f"criterion {n:2d} {status}  {_CRITERIA[n]}{extra}")
