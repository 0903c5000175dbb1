import contextlib

import pytest

_RESULTS: dict[int, tuple[str, str, str]] = {}


@contextlib.contextmanager
def _criterion(number: int, title: str):
    notes: list[str] = []
    try:
        yield notes
    except BaseException:
        _RESULTS[number] = ("FAIL", title, "; ".join(notes))
        raise
    _RESULTS[number] = ("PASS", title, "; ".join(notes))


@pytest.fixture
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title, notes = _RESULTS[number]
        line = f"criterion {number}: {status}: {title}"
        if notes:
            line += f" ({notes})"
        terminalreporter.write_line(line)
