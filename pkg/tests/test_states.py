import json
import math

import numpy as np
import pytest

from concavity_bounds.core.errors import (DimensionError, DomainError, InvalidBloch, InvalidDensityMatrix,
                                          StateFileError)
from concavity_bounds.core.states import (BlochVector, DensityMatrix, MixtureProblem, SamplerConfig,
                                          block_embed, derive_seed, from_bloch, load_state_file,
                                          maximally_mixed, mix, parse_state_document, product_state,
                                          pure_state, random_bloch, random_density, random_unitary,
                                          reverse_mix, state_to_json, to_bloch)


def test_from_bloch_pauli_expansion():
    rho = from_bloch((0.0, 0.0, 1.0))
    np.testing.assert_allclose(rho.entries, [[1.0, 0.0], [0.0, 0.0]])
    rho = from_bloch((0.3, -0.4, 0.1))
    np.testing.assert_allclose(rho.entries, 0.5 * np.array([[1.1, 0.3 + 0.4j], [0.3 - 0.4j, 0.9]]))


def test_bloch_vector_bounds():
    BlochVector((1.0 + 1e-13, 0.0, 0.0))
    with pytest.raises(InvalidBloch):
        from_bloch((0.8, 0.8, 0.0))
    with pytest.raises(InvalidBloch):
        BlochVector((math.nan, 0.0, 0.0))
    with pytest.raises(DimensionError):
        BlochVector((0.1, 0.2))


def test_to_bloch_reads_back_components():
    w = to_bloch(from_bloch((0.2876, 0.4322, 0.3112))).w
    np.testing.assert_allclose(w, (0.2876, 0.4322, 0.3112), atol=1e-15)
    with pytest.raises(DimensionError):
        to_bloch(maximally_mixed(3))


def test_density_matrix_validation():
    with pytest.raises(InvalidDensityMatrix):
        DensityMatrix(np.diag([0.5, 0.6]))
    with pytest.raises(InvalidDensityMatrix):
        DensityMatrix(np.diag([1.5, -0.5]))

    rho = DensityMatrix(np.diag([1.0 + 5e-11, -5e-11]))
    assert rho.spectrum[0] == 0.0
    assert rho.rank() == 1


def test_pure_and_maximally_mixed():
    rho = pure_state([1.0, 1.0j])
    assert rho.rank() == 1
    np.testing.assert_allclose(rho.entries, 0.5 * np.array([[1.0, -1.0j], [1.0j, 1.0]]))
    assert maximally_mixed(4).rank() == 4
    with pytest.raises(DomainError):
        pure_state([0.0, 0.0])


def test_mixture_problem_validation():
    rho = maximally_mixed(2)
    for x in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(DomainError):
            MixtureProblem(x, rho, rho)
    with pytest.raises(DimensionError):
        MixtureProblem(0.5, rho, maximally_mixed(3))


def test_mix_and_reverse_mix():
    problem = MixtureProblem(0.25, from_bloch((0.0, 0.0, 1.0)), from_bloch((0.0, 0.0, -1.0)))
    np.testing.assert_allclose(np.real(np.diag(mix(problem).entries)), [0.25, 0.75])
    np.testing.assert_allclose(np.real(np.diag(reverse_mix(problem).entries)), [0.75, 0.25])

    swapped = problem.swapped()
    assert swapped.x == 0.75
    assert swapped.rho_av.matrix.allclose(problem.rho_av.matrix)


def test_block_embedding_marginals(make_problem):
    problem = make_problem(3, 11)
    embedding = block_embed(problem)
    x = problem.x

    assert embedding.p_ab.dim == 6
    assert embedding.p_a.matrix.allclose(problem.rho_av.matrix)
    np.testing.assert_allclose(embedding.p_b.entries, np.diag([x, 1.0 - x]), atol=1e-15)

    product = product_state(embedding.p_a, embedding.p_b).entries
    np.testing.assert_allclose(product[:3, :3], x * problem.rho_av.entries, atol=1e-15)
    np.testing.assert_allclose(product[3:, 3:], (1.0 - x) * problem.rho_av.entries, atol=1e-15)
    np.testing.assert_allclose(product[:3, 3:], 0.0)


def test_random_density_is_seeded():
    first = random_density(SamplerConfig(4, seed=99))
    second = random_density(SamplerConfig(4, seed=99))
    other = random_density(SamplerConfig(4, seed=100))
    np.testing.assert_array_equal(first.entries, second.entries)
    assert not np.allclose(first.entries, other.entries)
    assert first.matrix.trace() == pytest.approx(1.0, abs=1e-12)
    assert first.rank() == 4


@pytest.mark.parametrize("rank", [1, 2])
def test_random_density_rank(rank):
    for seed in range(5):
        assert random_density(SamplerConfig(5, rank, seed)).rank(threshold=1e-9) == rank


def test_sampler_config_validation():
    with pytest.raises(DomainError):
        SamplerConfig(3, rank=4)
    with pytest.raises(DomainError):
        SamplerConfig(3, seed=-1)
    with pytest.raises(DomainError):
        SamplerConfig(3, seed=2 ** 64)


def test_derive_seed():
    assert derive_seed(7, 3) == derive_seed(7, 3)
    assert len({derive_seed(7, i) for i in range(100)}) == 100
    assert derive_seed(7, 3) != derive_seed(8, 3)
    assert 0 <= derive_seed(2 ** 64 - 1, 10 ** 6) < 2 ** 64


def test_random_bloch_in_ball():
    for seed in range(50):
        assert random_bloch(seed).norm <= 1.0


def test_random_unitary():
    u = random_unitary(5, 3)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(5), atol=1e-12)


def test_state_file_round_trip(tmp_path):
    qubit = from_bloch((0.1, -0.2, 0.3))
    qutrit = random_density(SamplerConfig(3, seed=5))

    for rho in (qubit, qutrit):
        path = tmp_path / "state.json"
        path.write_text(json.dumps(state_to_json(rho)))
        assert load_state_file(path).matrix.allclose(rho.matrix, atol=1e-15)

    assert "matrix" in state_to_json(qubit, prefer_bloch=False)


def test_state_file_errors(tmp_path):
    with pytest.raises(StateFileError):
        load_state_file(tmp_path / "missing.json")

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(StateFileError):
        load_state_file(broken)

    with pytest.raises(StateFileError):
        parse_state_document({"bloch": [1.0, 1.0, 1.0]})
    with pytest.raises(StateFileError):
        parse_state_document({"matrix": {"re": [[1.0, 0.0], [0.0, 0.0]], "im": [[0.0]]}})
    with pytest.raises(StateFileError):
        parse_state_document({"something": 1})
    with pytest.raises(StateFileError):
        parse_state_document([0.0, 0.0, 1.0])


def test_random_density_snapshot_seed_42():
    rho = random_density(SamplerConfig(2, seed=42))

    rng = np.random.Generator(np.random.PCG64(42))
    g = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / math.sqrt(2.0)
    expected = g @ g.conj().T
    expected /= np.trace(expected).real
    np.testing.assert_allclose(rho.entries, expected, atol=1e-15)
    np.testing.assert_array_equal(rho.entries, random_density(SamplerConfig(2, seed=42)).entries)


@pytest.mark.slow
def test_random_density_invariants_over_many_seeds():
    for seed in range(10_000):
        dim = 2 + seed % 4
        rank = None if seed % 3 == 0 else 1 + seed % dim
        rho = random_density(SamplerConfig(dim, rank, seed))
        np.testing.assert_allclose(rho.entries, rho.entries.conj().T, atol=1e-15)
        assert rho.matrix.trace() == pytest.approx(1.0, abs=1e-12)
        assert rho.spectrum[0] >= 0.0
        assert rho.rank(threshold=1e-9) == (dim if rank is None else rank)


def test_random_bloch_mean_is_centred():
    samples = np.array([random_bloch(seed).w for seed in range(100_000)])
    assert np.all(np.abs(samples.mean(axis=0)) < 0.02)


def test_mixture_rank_dominates_component_ranks(make_problem):
    for seed in range(20):
        problem = make_problem(4, seed, rank=1 + seed % 3)
        ranks = (problem.rho1.rank(), problem.rho2.rank())
        assert problem.rho_av.rank() >= max(ranks)
        assert problem.rho_rev.rank() >= max(ranks)


def test_cached_embedding_matches_direct_construction(make_problem):
    problem = make_problem(3, 8)
    direct = block_embed(problem)
    cached = problem.embedding
    assert cached is problem.embedding
    np.testing.assert_allclose(cached.p_ab.entries, direct.p_ab.entries, atol=1e-15)
    np.testing.assert_allclose(problem.product.entries,
                               product_state(direct.p_a, direct.p_b).entries, atol=1e-15)
    # spectra carried over from the blocks and from rho_Av agree with a fresh solve
    np.testing.assert_allclose(cached.p_ab.spectrum, np.linalg.eigvalsh(cached.p_ab.entries), atol=1e-12)
    np.testing.assert_allclose(cached.p_a.spectrum, np.linalg.eigvalsh(cached.p_a.entries), atol=1e-12)
    np.testing.assert_allclose(problem.product.spectrum, np.linalg.eigvalsh(problem.product.entries),
                               atol=1e-12)
