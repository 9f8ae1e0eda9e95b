"""Shared pytest scaffolding.

Collects the acceptance verdict lines and replays them in the terminal
summary, where they survive output capture.
"""

_verdicts = []


def record_verdict(line: str) -> None:
    _verdicts.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _verdicts:
        terminalreporter.section("acceptance verdicts")
        for line in _verdicts:
            terminalreporter.write_line(line)
