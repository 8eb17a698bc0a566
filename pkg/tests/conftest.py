import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion implemented by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = marker.args
    if rep.when == "call" or rep.failed:
        _results[key] = _results.get(key, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(_results.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}")
