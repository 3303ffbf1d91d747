import pytest

_CRITERIA: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA.setdefault(marker.args[0], []).append(
            "passed" if report.outcome == "passed" else item.name
        )


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        failed = [r for r in _CRITERIA[n] if r != "passed"]
        status = "FAIL" if failed else "PASS"
        detail = f" ({', '.join(failed)})" if failed else f" ({len(_CRITERIA[n])} checks)"
        terminalreporter.write_line(f"criterion {n:>2}: {status}{detail}")
