from datetime import date

import pytest

from bvalnet.seismicity import DateWindow, RegionConfig
from bvalnet.synthcat import SynthParams, gen_catalog

_criteria: list[tuple[str, bool, float, str]] = []


@pytest.fixture
def record_criterion():
    """Register an acceptance line; printed in the terminal summary."""

    def record(name, passed, seconds, detail=""):
        _criteria.append((name, bool(passed), seconds, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, seconds, detail in _criteria:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {name} ({seconds:.2f}s) {detail}".rstrip())


@pytest.fixture(scope="session")
def synth_400():
    """Seeded catalog of about 400 events over 400 days at Mc 3.0."""
    return gen_catalog(SynthParams(b_true=1.0, cutoff=3.0, rate=1.0, duration=400, seed=1))


@pytest.fixture(scope="session")
def synth_region():
    return RegionConfig(
        name="synthetic",
        region_id=99,
        cutoff_magnitude=3.0,
        train_window=DateWindow.from_dates(date(2000, 3, 15), date(2000, 8, 31)),
        test_window=DateWindow.from_dates(date(2000, 9, 1), date(2001, 2, 3)),
    )
