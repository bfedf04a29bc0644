import time

import pytest

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    yield
    item.user_properties.append(("elapsed", time.perf_counter() - start))


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = dict(report.user_properties).get("criterion")
    if marker is None:
        return
    number, title = marker
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "elapsed": 0.0, "failed": []})
    entry["elapsed"] += dict(report.user_properties).get("elapsed", 0.0)
    if report.outcome != "passed":
        entry["ok"] = False
        entry["failed"].append(report.nodeid.split("::")[-1])


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", tuple(mark.args)))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["ok"] else "FAIL"
        line = f"criterion {number:>2} {status}  {entry['title']}  ({entry['elapsed']:.1f} s)"
        if entry["failed"]:
            line += "  failing: " + ", ".join(entry["failed"])
        terminalreporter.write_line(line)
