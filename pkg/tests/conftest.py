import numpy as np
import pytest

from luinv.states import DensityMatrix, PureState, random_density, random_pure


def relerr(a, b) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def unit_pure(dims, seed) -> PureState:
    psi = random_pure(dims, seed)
    return PureState(dims, psi.amplitudes / psi.norm())


def unit_density(dims, seed, rank=None) -> DensityMatrix:
    rho = random_density(dims, seed, rank)
    return DensityMatrix(dims, rho.entries / abs(rho.trace()))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
