import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ssband.wavelet_core import standard_profile

settings.register_profile("ssband", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ssband")


@pytest.fixture(scope="session")
def db6():
    return standard_profile("daubechies", 6)


@pytest.fixture(scope="session")
def db6_j0():
    """db6 profile with constants computed for the coarsest level 0."""
    return standard_profile("daubechies", 6, 12, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
