"""Collects acceptance outcomes and prints one verdict line per criterion."""

import pytest

_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion this test checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(marker.args[0], []).append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        checks = _outcomes[n]
        failed = [name for name, o in checks if o != "passed"]
        verdict = "FAIL" if failed else "PASS"
        detail = f" ({', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n:>2}: {verdict}{detail}")
