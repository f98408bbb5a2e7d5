import numpy as np
import pytest

from weyl_lab.numerics import TruncationConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_cfg():
    """Coarse truncation that keeps unit tests quick; trusted block of 4 modes."""
    return TruncationConfig(hermite_cutoff=12, buffer=8, theta_samples=16, quad_radius=8.0, quad_points=80)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
