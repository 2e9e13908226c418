import numpy as np
import pytest

from stickygas import grid

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def pair_grid():
    return grid.uniform_grid(2)


@pytest.fixture
def skew_grid():
    # weights (1/4, 3/4) with cell midpoints
    return grid.GridMeasure([0.25, 0.75], [0.125, 0.625])


def random_grid(rng, n):
    w = rng.uniform(0.1, 1.0, n)
    return grid.GridMeasure(w / w.sum(), (np.arange(n) + 0.5) / n)


def random_data(rng, n):
    return np.sort(rng.standard_normal(n)), rng.standard_normal(n)
