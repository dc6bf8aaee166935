import pytest

_results: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion implemented by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    prev = _results.get(number)
    status = "PASS" if report.passed else "FAIL"
    if prev and prev[0] == "FAIL":
        status = "FAIL"
    _results[number] = (status, title, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        status, title, seconds = _results[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title} ({seconds:.2f}s)")
