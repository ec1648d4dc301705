import math

import numpy as np
import pytest

from irfcorr.exact_diag import ground_state
from irfcorr.nlie_solver import RapidityGrid, solve_aux
from irfcorr.omega import nlie_provider, thermo_provider

# Reference rows: x1, x1x2, x1x2x3, x1x3, y1y3 (8 decimals, 12 for L = inf).
TABLE1 = {
    4: (-0.66666667, 0.33333333, -0.66666667, 1.00000000, 0.66666667),
    8: (-0.60851556, 0.26103720, -0.25193710, 0.55630211, 0.21746487),
    12: (-0.59859899, 0.25044371, -0.22109565, 0.51802986, 0.18542814),
    16: (-0.59519136, 0.24696584, -0.21183645, 0.50601523, 0.17583391),
    32: (-0.59193864, 0.24374937, -0.20358916, 0.49500263, 0.16727766),
    64: (-0.59113127, 0.24297329, -0.20163433, 0.49232982, 0.16524315),
    128: (-0.59092994, 0.24278223, -0.20115366, 0.49166622, 0.16474172),
    256: (-0.59087965, 0.24273481, -0.20103420, 0.49150058, 0.16461694),
    512: (-0.59086709, 0.24272301, -0.20100442, 0.49145918, 0.16458580),
    1024: (-0.59086395, 0.24272006, -0.20099698, 0.49144884, 0.16457802),
    math.inf: (-0.590862907413, 0.242719079825, -0.200994509028, 0.491445392361,
               0.164575433372),
}
COLUMNS = ("x1", "x1x2", "x1x2x3", "x1x3", "y1y3")


@pytest.fixture(scope="session")
def table1():
    return TABLE1


@pytest.fixture(scope="session")
def default_grid():
    return RapidityGrid()


@pytest.fixture(scope="session")
def aux_cache(default_grid):
    cache = {}

    def get(L):
        if L not in cache:
            cache[L] = solve_aux(L, default_grid)
        return cache[L]

    return get


@pytest.fixture(scope="session")
def nlie_providers(aux_cache):
    cache = {}

    def get(L):
        if L not in cache:
            cache[L] = nlie_provider(aux_cache(L))
        return cache[L]

    return get


@pytest.fixture(scope="session")
def thermo():
    return thermo_provider()


@pytest.fixture(scope="session")
def gs8_generic():
    """L = 8 ground state with fixed generic inhomogeneities."""
    u = np.array([0.11, -0.07, 0.2, -0.15, 0.05, -0.22, 0.17, 0.01])
    return ground_state(8, u)


@pytest.fixture(scope="session")
def gs_homogeneous():
    cache = {}

    def get(L):
        if L not in cache:
            cache[L] = ground_state(L)
        return cache[L]

    return get
