import numpy as np
import pytest

from concavity_bounds.core.states import (MixtureProblem, SamplerConfig, derive_seed, from_bloch,
                                          make_generator, random_density)


@pytest.fixture
def orthogonal_problem():
    """Orthogonal pure qubit states |0><0| and |1><1| mixed equally."""
    return MixtureProblem(0.5, from_bloch((0.0, 0.0, 1.0)), from_bloch((0.0, 0.0, -1.0)))


@pytest.fixture
def appendix_a():
    return MixtureProblem(0.7086, from_bloch((0.2876, 0.4322, 0.3112)),
                          from_bloch((-0.1552, -0.0532, -0.0874)))


@pytest.fixture
def make_problem():
    """Factory for seeded random mixture problems with x in (0.05, 0.95)."""
    def build(dim, seed, rank=None, x=None):
        if x is None:
            x = float(make_generator(seed).uniform(0.05, 0.95))
        rho1 = random_density(SamplerConfig(dim, rank, derive_seed(seed, 1)))
        rho2 = random_density(SamplerConfig(dim, rank, derive_seed(seed, 2)))
        return MixtureProblem(x, rho1, rho2)
    return build


@pytest.fixture
def random_hermitian():
    def build(dim, seed):
        rng = make_generator(seed)
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        return g + g.conj().T
    return build
