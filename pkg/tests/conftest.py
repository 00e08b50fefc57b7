import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ncqm.qspace import ModelParams

settings.register_profile(
    "ncqm",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ncqm")

# Lines appended by test_acceptance.py, echoed at the end of the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def ref_params():
    """m = hbar = 1, theta = 0.2, omega_L = 1, omega_R = 0."""
    return ModelParams(m=1.0, hbar=1.0, theta=0.2, omega_l=1.0, omega_r=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
