from __future__ import annotations

ACCEPTANCE_LINES: list = []


def record(result):
    ACCEPTANCE_LINES.append(result.line())
    print(result.line())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
