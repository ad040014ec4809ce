import pytest

from substrate.rules import builtin_rule


@pytest.fixture(scope="session")
def tm():
    return builtin_rule("thue_morse")


@pytest.fixture(scope="session")
def mask5():
    return builtin_rule("mask5")


@pytest.fixture(scope="session")
def chair():
    return builtin_rule("chair")


ACCEPTANCE_LINES = []


@pytest.fixture
def record_line():
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
