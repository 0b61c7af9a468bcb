import pytest

from leastaction.model import linear_model

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def free1():
    return linear_model(1.0, [0.0])


@pytest.fixture
def field2():
    """m = 1, K = 2: the uniform field of the least-action scenario."""
    return linear_model(1.0, [2.0])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
