import numpy as np
import pytest

from fluxstark import CoupledSpec, FluxoniumSpec, assemble_and_label
from fluxstark.dynamics import RWAModel

QUBIT_A = FluxoniumSpec(1.051, 0.753, 5.263)
QUBIT_B = FluxoniumSpec(1.069, 0.771, 3.870)
J_C = 0.248
EPS_RATIO = 1.3


@pytest.fixture(scope="session")
def main_spectrum():
    return assemble_and_label(CoupledSpec(QUBIT_A, QUBIT_B, J_C))


@pytest.fixture(scope="session")
def main_model(main_spectrum):
    return RWAModel.from_spectrum(main_spectrum, EPS_RATIO)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_unitary(rng, d):
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, d, rank=None):
    rank = rank or d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)
