import numpy as np
import pytest

from entsig import DensityMatrix, ardehali, ghz_state, mermin, projector_witness


@pytest.fixture(scope="session")
def ghz4():
    return ghz_state(4)


@pytest.fixture(scope="session")
def rho_ghz4(ghz4):
    return DensityMatrix.from_pure(ghz4)


@pytest.fixture(scope="session")
def mermin4():
    return mermin(4)


@pytest.fixture(scope="session")
def ardehali4():
    return ardehali(4)


@pytest.fixture(scope="session")
def witness4():
    return projector_witness(4)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)


def random_density(rng, n_qubits):
    """Full-rank random state: normalized G G^dag for a complex Gaussian G."""
    d = 2**n_qubits
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    m /= m.trace().real
    return DensityMatrix(n_qubits, m)


def random_pure(rng, n_qubits):
    from entsig import PureState

    d = 2**n_qubits
    amp = rng.normal(size=d) + 1j * rng.normal(size=d)
    amp /= np.linalg.norm(amp)
    return PureState(n_qubits, amp)
