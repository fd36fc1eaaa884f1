import pytest

from helpers import ACCEPTANCE_RESULTS, FIXTURES


@pytest.fixture
def golden_xml():
    return FIXTURES / "golden_home.xml"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
