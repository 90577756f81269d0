"""Shared test plumbing.

The acceptance tests register one status line per criterion; printing them
from a terminal-summary hook keeps them visible despite pytest's fd-level
output capture.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
