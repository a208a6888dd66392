import numpy as np
import pytest
from hypothesis import settings

from vqx.cases import H2, HEH
from vqx.encoding import build_observables, qubit_hamiltonian
from vqx.integrals import Geometry, molecular_problem

settings.register_profile("vqx", max_examples=40, deadline=None)
settings.load_profile("vqx")

BOHR_TO_ANGSTROM = 1 / 1.8897259886


@pytest.fixture(scope="session")
def h2_problem():
    """H2 at 1.4 Bohr, the textbook geometry."""
    return molecular_problem(Geometry.diatomic("H", "H", 1.4 * BOHR_TO_ANGSTROM))


@pytest.fixture(scope="session")
def h2_07():
    return molecular_problem(H2.geometry(0.7))


@pytest.fixture(scope="session")
def heh_08():
    return molecular_problem(HEH.geometry(0.8))


@pytest.fixture(scope="session")
def obs_bk():
    return build_observables(2, "bk")


@pytest.fixture(scope="session")
def obs_jw():
    return build_observables(2, "jw")


@pytest.fixture(scope="session")
def h2_bk(h2_07):
    return qubit_hamiltonian(h2_07, "bk")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
