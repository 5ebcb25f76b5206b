import pytest

_LINES: dict[str, str] = {}


@pytest.fixture
def criterion():
    """Record one acceptance verdict line: ``criterion(key, ok, detail)``."""

    def record(key: str, ok: bool, detail: str) -> bool:
        _LINES[key] = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_LINES):
        terminalreporter.write_line(_LINES[key])
