import warnings

import pytest

from toprec.curve import DimensionWarning
from toprec.models import gaussian_model, quartic_formal_model
from toprec.recursion import CorrelatorStore

_CRITERIA = []


def pytest_configure(config):
    warnings.simplefilter("ignore", DimensionWarning)


@pytest.fixture
def record_criterion():
    """Record one acceptance line: (label, ok, detail)."""
    def rec(label, ok, detail=""):
        _CRITERIA.append((label, bool(ok), detail))
        return ok
    return rec


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())


@pytest.fixture(scope="session")
def gaussian_store():
    return CorrelatorStore(gaussian_model())


@pytest.fixture(scope="session")
def quartic2_store():
    return CorrelatorStore(quartic_formal_model(2))
