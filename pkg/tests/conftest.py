from collections import defaultdict

import pytest

CRITERIA = {
    1: "naive bounds",
    2: "upper bound, low dimension",
    3: "upper bounds, high dimension",
    4: "depth monotonicity",
    5: "lower-bound replay",
    6: "matching oracle",
    7: "histogram oracle",
    8: "lower <= upper <= naive",
    9: "determinism across thread counts",
}

_outcomes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes[marker.args[0]].append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            continue
        failed = [name for name, ok in results if not ok]
        status = "FAIL" if failed else "PASS"
        extra = f"  ({', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n}: {status}  {title}{extra}")
