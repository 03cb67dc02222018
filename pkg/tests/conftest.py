"""Shared pytest hooks.

The acceptance tests record one PASS/FAIL line per criterion; replaying
them in the terminal summary keeps them visible even with output capture
enabled.
"""

criterion_lines = []


def pytest_terminal_summary(terminalreporter):
    if not criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in criterion_lines:
        terminalreporter.write_line(line)
