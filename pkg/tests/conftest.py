from __future__ import annotations

import pytest

_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line and fail the test if any check failed."""

    def record(label: str, failures: list[str]) -> None:
        line = f"{'PASS' if not failures else 'FAIL'}  {label}"
        _LINES.append(line)
        print(line)
        assert not failures, "\n".join(failures[:20])

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
