"""Shared reporting: collect acceptance lines, echo them after the run."""

import pytest

_LINES = []


@pytest.fixture(scope="session")
def criterion():
    """Record a one-line verdict; echoed in the terminal summary."""

    def report(line):
        _LINES.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
