import pytest

from plants import paper

#: criterion number -> (description, passed)
ACCEPTANCE: dict[int, tuple[str, bool]] = {}


@pytest.fixture
def plant():
    return paper()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, text = marker.args
    if report.when == "call" or (report.when == "setup" and not report.passed):
        ACCEPTANCE[number] = (text, report.passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        text, ok = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {text}")
