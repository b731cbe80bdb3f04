import numpy as np
import pytest

from krausloom.qmath import DensityMatrix, PureState


def random_pure_vector(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_pure(rng, dims=(2, 2)) -> PureState:
    return PureState(random_pure_vector(rng, int(np.prod(dims))), dims)


def random_density(rng, dims=(2, 2)) -> DensityMatrix:
    dim = int(np.prod(dims))
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = a @ a.conj().T
    return DensityMatrix(m / np.trace(m).real, dims)


def random_qubit(rng):
    return random_pure_vector(rng, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)
