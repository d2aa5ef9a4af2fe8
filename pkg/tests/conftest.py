import pytest
from helpers import gaussian_on_own_grid

from cavity_cz import PhysicalParams


@pytest.fixture
def matched():
    """The reference matching point g = 1, kappa = 2, delta = 1."""
    return PhysicalParams(g=1.0, kappa=2.0, delta=1.0, gamma=0.0)


@pytest.fixture
def narrow_packet():
    return gaussian_on_own_grid(2.0 / 1000)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
