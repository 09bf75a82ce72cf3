import pytest

from ruinwalk import _backend

# (criterion, status, detail) rows printed at the end of the run
ACCEPTANCE_ROWS: list[tuple[str, str, str]] = []


@pytest.fixture(params=_backend.available())
def backend(request):
    """Run a test once per importable kernel backend."""
    previous = _backend.name()
    _backend.use(request.param)
    yield request.param
    _backend.use(previous)


@pytest.fixture
def record_acceptance():
    def record(criterion: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_ROWS.append((criterion, "PASS" if ok else "FAIL", detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_ROWS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in ACCEPTANCE_ROWS:
        terminalreporter.write_line(f"{status}  {criterion}: {detail}")
