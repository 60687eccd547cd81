import pytest

from pdmsplit.potentials import BENDANIEL_DUKE, ZHU_KROEMER
from pdmsplit.profiles import builtin_profiles

ALLOWED_PRESETS = [BENDANIEL_DUKE, ZHU_KROEMER]


@pytest.fixture(params=builtin_profiles(), ids=lambda p: p.name)
def profile(request):
    return request.param


@pytest.fixture(params=ALLOWED_PRESETS, ids=lambda p: p.name)
def preset(request):
    return request.param


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(tag, ok, detail)."""

    def record(tag, ok, detail=""):
        _CRITERIA.append((tag, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for tag, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{tag:<24} {'PASS' if ok else 'FAIL'}  {detail}")
