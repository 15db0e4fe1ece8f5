import pytest

_CRITERIA = {}


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` records one part of an acceptance criterion."""
    def record(n, ok, detail):
        _CRITERIA.setdefault(n, []).append((bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} criterion {n} part: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        parts = _CRITERIA[n]
        ok = all(p for p, _ in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: " + "; ".join(d for _, d in parts))
