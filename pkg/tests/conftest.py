import pytest

from wpcurv.curvature import CurvatureContext
from wpcurv.disk import build_grid
from wpcurv.resolvent import ResolventOperator

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def grid():
    return build_grid()


@pytest.fixture(scope="session")
def op(grid):
    return ResolventOperator(grid)


@pytest.fixture(scope="session")
def kernel_op(grid):
    return ResolventOperator(grid, "kernel_convolution")


@pytest.fixture(scope="session")
def ctx():
    return CurvatureContext()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
