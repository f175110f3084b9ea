import numpy as np
import pytest

from gpx.grid import Grid, GridField
from gpx import profiles as P


@pytest.fixture(scope="session")
def grid():
    return Grid(30.0, 1024)


@pytest.fixture(scope="session")
def fine_grid():
    return Grid(40.0, 4096)


@pytest.fixture(scope="session")
def one(grid):
    return P.sample(P.constant_one(), grid)


@pytest.fixture(scope="session")
def bump(grid):
    return P.sample(P.bump(0.2 + 0.1j), grid)


@pytest.fixture(scope="session")
def twisted_bump(grid):
    return P.sample(P.bump(0.15 - 0.1j, phase_ramp=0.7), grid)


@pytest.fixture(scope="session")
def sol(grid):
    return P.sample(P.soliton(0.5), grid)
