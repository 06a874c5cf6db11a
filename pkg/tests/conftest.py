import pytest

ACCEPTANCE_LINES: list[str] = []


def record(line: str) -> None:
    """Store an acceptance verdict line; printed again in the terminal summary."""
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture
def accept():
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
