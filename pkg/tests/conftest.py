import numpy as np
import pytest

from wsnsim.model import NetworkConfig, ThreeLevel

S1 = ThreeLevel(m=0.5, m_o=0.4, a=1.5, b=3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def s1_config():
    return NetworkConfig(heterogeneity=S1)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
