"""Session-scoped fixtures shared across the test suite.

Two parameter triples exercise the admissible regime from both ends:
(2, 0.75, 0.5) has p = 5 (strongly supercritical in the p > 2 sense) and
(3, 0.9, 0.4) has p ~ 3.33.  The extremal profiles and eigenreports are
solved once per session and reused.
"""

import numpy as np
import pytest

import fraclab as fl


@pytest.fixture(scope="session")
def params1():
    return fl.Params(2, 0.75, 0.5)


@pytest.fixture(scope="session")
def params2():
    return fl.Params(3, 0.9, 0.4)


@pytest.fixture(scope="session")
def grid():
    return fl.default_grid()


@pytest.fixture(scope="session")
def wide_grid():
    return fl.make_log_grid(1e-12, 1e12, 8192)


@pytest.fixture(scope="session")
def V1(params1, grid):
    return fl.solve_bubble(params1, grid, tol=1e-10)


@pytest.fixture(scope="session")
def V2(params2, grid):
    return fl.solve_bubble(params2, grid, tol=1e-10)


@pytest.fixture(scope="session")
def V1_wide(params1, wide_grid):
    return fl.solve_bubble(params1, wide_grid, tol=1e-10)


@pytest.fixture(scope="session")
def report1(V1):
    return fl.linearized_eigs(V1, k=5)


@pytest.fixture(scope="session")
def report2(V2):
    return fl.linearized_eigs(V2, k=5)


@pytest.fixture(scope="session")
def sweep1(V1_wide):
    """Sharpness sweep for the first configuration (needs the wide grid)."""
    return fl.stability_sweep(V1_wide)


@pytest.fixture(scope="session")
def sweep2(V2):
    return fl.stability_sweep(V2)


@pytest.fixture(scope="session")
def gaussian(grid):
    return fl.RadialFn(grid, np.exp(-grid.nodes**2 / 2.0))
