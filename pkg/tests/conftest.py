import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdicts(pytestconfig):
    """Acceptance tests append ``(number, title, passed, detail)`` here."""
    return pytestconfig.stash[_VERDICTS]


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_VERDICTS, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(rows):
        terminalreporter.write_line(
            f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {title} | {detail}")
