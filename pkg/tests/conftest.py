import pytest

from scatterkit.lattice import Seed
from scatterkit.scattering import complete, initial_diagram


@pytest.fixture(scope="session")
def a2():
    return Seed.make([[0, 1], [-1, 0]], [0, 1])


@pytest.fixture(scope="session")
def kronecker2():
    return Seed.make([[0, 2], [-2, 0]], [0, 1])


@pytest.fixture(scope="session")
def kronecker3():
    return Seed.make([[0, 3], [-3, 0]], [0, 1])


@pytest.fixture(scope="session")
def torus_seed():
    return Seed.make([[0, 1], [-1, 0]], [])


@pytest.fixture(scope="session")
def a2_diagram(a2):
    return complete(a2, 6)


@pytest.fixture(scope="session")
def a2_diagram_k5(a2):
    return complete(a2, 5)


@pytest.fixture(scope="session")
def k2_diagram(kronecker2):
    return complete(kronecker2, 6)


@pytest.fixture(scope="session")
def torus_diagram(torus_seed):
    return initial_diagram(torus_seed, 5)
