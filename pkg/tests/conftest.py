import math

import numpy as np
import pytest

from dnls_lab.spectral import Field, make_grid
from dnls_lab.variational import ground_state_Q


@pytest.fixture(scope="session")
def grid():
    return make_grid()


@pytest.fixture(scope="session")
def wide_grid():
    # same dx as the default grid, twice the box
    return make_grid(80.0, 2048)


@pytest.fixture(scope="session")
def Q(grid):
    return ground_state_Q(grid)


@pytest.fixture(scope="session")
def Q_wide(wide_grid):
    return ground_state_Q(wide_grid)


@pytest.fixture(scope="session")
def gaussian(grid):
    return Field.from_function(grid, lambda x: np.exp(-x**2 / 2))


def boosted_gaussian(grid, c, sigma=math.sqrt(2)):
    return Field.from_function(grid, lambda x: np.exp(-x**2 / sigma**2 + 1j * c * x))


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
