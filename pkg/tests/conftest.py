import pytest

from backresp import zoo

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def train():
    return zoo.train()


@pytest.fixture(scope="session")
def train5():
    return zoo.train(5)


@pytest.fixture(scope="session")
def dresden():
    return zoo.dresden()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
