"""
Density matrices: Bloch-vector qubits, mixtures, the block embedding and
seeded random states.
"""

import json
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.math_utils import vector_norm_3d
from .errors import (DimensionError, DomainError, InvalidBloch, InvalidDensityMatrix,
                     NotPositiveSemidefinite, StateFileError)
from .hermitian import (DEFAULT_POLICY, HermitianMatrix, SupportPolicy, kron, partial_trace,
                        psd_spectrum, trace_norm)

logger = logging.getLogger(__name__)

BLOCH_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-10
SEED_LIMIT = 2 ** 64

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True)
class BlochVector:
    """Real 3-vector w with |w| <= 1 parameterising (I + w.sigma) / 2."""
    w: Tuple[float, float, float]

    def __post_init__(self) -> None:
        if len(self.w) != 3:
            raise DimensionError(f"Bloch vector needs 3 components, got {len(self.w)}")
        components = tuple(float(c) for c in self.w)
        if not all(math.isfinite(c) for c in components):
            raise InvalidBloch(f"Bloch vector components must be finite, got {components}")
        object.__setattr__(self, "w", components)
        if self.norm > 1.0 + BLOCH_TOLERANCE:
            raise InvalidBloch(f"Bloch vector {components} has norm {self.norm:.12f} > 1")

    @property
    def norm(self) -> float:
        return vector_norm_3d(self.w)

    def __iter__(self):
        return iter(self.w)


class DensityMatrix:
    """
    Positive semidefinite, unit-trace Hermitian matrix.

    Eigenvalues in [-1e-10, 0) are tolerated and reported as 0 by
    ``spectrum``; anything more negative is rejected.
    """

    def __init__(self, matrix: Union[HermitianMatrix, np.ndarray, Sequence[Sequence[complex]]],
                 policy: SupportPolicy = DEFAULT_POLICY):
        hermitian = matrix if isinstance(matrix, HermitianMatrix) else HermitianMatrix(matrix)

        trace = hermitian.trace()
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise InvalidDensityMatrix(f"Density matrix trace is {trace!r}, expected 1")
        try:
            psd_spectrum(hermitian, policy)
        except NotPositiveSemidefinite as e:
            raise InvalidDensityMatrix(str(e)) from e

        self._matrix = hermitian
        self._policy = policy

    @property
    def matrix(self) -> HermitianMatrix:
        return self._matrix

    @property
    def entries(self) -> np.ndarray:
        return self._matrix.entries

    @property
    def dim(self) -> int:
        return self._matrix.dim

    @property
    def policy(self) -> SupportPolicy:
        return self._policy

    @cached_property
    def spectrum(self) -> np.ndarray:
        """Ascending eigenvalues with roundoff negatives clamped to 0."""
        return psd_spectrum(self._matrix, self._policy)

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._matrix.eig.eigenvectors

    def rank(self, threshold: Optional[float] = None) -> int:
        """Number of eigenvalues above ``threshold`` (default: support threshold)."""
        if threshold is None:
            threshold = self._policy.zero_threshold
        return int(np.count_nonzero(self.spectrum > threshold))

    def conjugate_by(self, unitary: np.ndarray) -> "DensityMatrix":
        return DensityMatrix(self._matrix.conjugate_by(unitary), self._policy)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, rank={self.rank()})"


def convex_combination(weight: float, rho1: DensityMatrix, rho2: DensityMatrix) -> DensityMatrix:
    """Return weight * rho1 + (1 - weight) * rho2."""
    return DensityMatrix(weight * rho1.matrix + (1.0 - weight) * rho2.matrix, rho1.policy)


@dataclass(frozen=True)
class MixtureProblem:
    """
    The triple (x, rho1, rho2).

    The mixtures rho_Av = x rho1 + (1-x) rho2 and rho_Rev = x rho2 + (1-x) rho1
    are derived on first use and cached.
    """
    x: float
    rho1: DensityMatrix
    rho2: DensityMatrix

    def __post_init__(self) -> None:
        if not 0.0 < self.x < 1.0:
            raise DomainError(f"Mixture weight must lie in (0, 1), got {self.x}")
        if self.rho1.dim != self.rho2.dim:
            raise DimensionError(f"State dimensions differ: {self.rho1.dim} vs {self.rho2.dim}")

    @property
    def dim(self) -> int:
        return self.rho1.dim

    @cached_property
    def rho_av(self) -> DensityMatrix:
        return convex_combination(self.x, self.rho1, self.rho2)

    @cached_property
    def rho_rev(self) -> DensityMatrix:
        return convex_combination(self.x, self.rho2, self.rho1)

    @cached_property
    def embedding(self) -> "BlockEmbedding":
        """The block embedding (P_AB, P_A, P_B), built once."""
        return block_embed(self)

    @cached_property
    def product(self) -> DensityMatrix:
        """P_A (x) P_B for the cached embedding."""
        return product_state(self.embedding.p_a, self.embedding.p_b)

    @cached_property
    def distance(self) -> float:
        """||rho1 - rho2||_1."""
        return trace_norm(self.rho1.matrix - self.rho2.matrix)

    def swapped(self) -> "MixtureProblem":
        """The same mixture written as (1 - x, rho2, rho1)."""
        return MixtureProblem(1.0 - self.x, self.rho2, self.rho1)

    def conjugate_by(self, unitary: np.ndarray) -> "MixtureProblem":
        return MixtureProblem(self.x, self.rho1.conjugate_by(unitary), self.rho2.conjugate_by(unitary))


class BlockEmbedding(NamedTuple):
    """P_AB with its marginals P_A = rho_Av and P_B = diag(x, 1-x)."""
    p_ab: DensityMatrix
    p_a: DensityMatrix
    p_b: DensityMatrix


@dataclass(frozen=True)
class SamplerConfig:
    """Settings for Ginibre sampling; ``rank=None`` means full rank."""
    dim: int
    rank: Optional[int] = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DomainError(f"dim must be positive, got {self.dim}")
        if self.rank is not None and not 1 <= self.rank <= self.dim:
            raise DomainError(f"rank must lie in [1, {self.dim}], got {self.rank}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def effective_rank(self) -> int:
        return self.dim if self.rank is None else self.rank


def from_bloch(w: Union[BlochVector, Sequence[float]]) -> DensityMatrix:
    """
    Build the qubit state (I + w1 s1 + w2 s2 + w3 s3) / 2.

    Raises:
        InvalidBloch: If |w| > 1 + 1e-12
    """
    vector = w if isinstance(w, BlochVector) else BlochVector(tuple(w))
    matrix = 0.5 * (np.eye(2, dtype=complex) + sum(c * s for c, s in zip(vector.w, PAULI)))
    return DensityMatrix(matrix)


def to_bloch(rho: DensityMatrix) -> BlochVector:
    """
    Read off the Pauli coefficients w_k = Tr(rho sigma_k).

    Raises:
        DimensionError: If rho is not a qubit state
    """
    if rho.dim != 2:
        raise DimensionError(f"Bloch vectors exist only for dim 2, got {rho.dim}")
    return BlochVector(tuple(float(np.trace(rho.entries @ s).real) for s in PAULI))


def pure_state(vector: Sequence[complex]) -> DensityMatrix:
    """|psi><psi| for a (not necessarily normalised) nonzero vector."""
    psi = np.asarray(vector, dtype=complex)
    norm = np.linalg.norm(psi)
    if psi.ndim != 1 or norm == 0.0:
        raise DomainError("pure_state needs a nonzero 1-d vector")
    psi = psi / norm
    return DensityMatrix(np.outer(psi, psi.conj()))


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim, dtype=complex) / dim)


def mix(problem: MixtureProblem) -> DensityMatrix:
    """x rho1 + (1 - x) rho2."""
    return problem.rho_av


def reverse_mix(problem: MixtureProblem) -> DensityMatrix:
    """x rho2 + (1 - x) rho1."""
    return problem.rho_rev


def block_embed(problem: MixtureProblem) -> BlockEmbedding:
    """
    Embed the mixture as the block-diagonal state diag(x rho1, (1-x) rho2).

    The two-dimensional flag factor B is the outer tensor slot, so P_AB is
    literally the 2x2 block matrix and P_A (x) P_B is diag(x rho_Av, (1-x) rho_Av).

    Returns:
        BlockEmbedding (P_AB, P_A, P_B); the marginals are computed by partial trace
    """
    d = problem.dim
    x = problem.x
    p_ab = HermitianMatrix.block_diagonal([x * problem.rho1.matrix, (1.0 - x) * problem.rho2.matrix])
    p_a = partial_trace(p_ab, outer_dim=2, inner_dim=d, keep="inner")
    av = problem.rho_av.matrix.eig
    p_a._with_eig(av.eigenvalues, av.eigenvectors)
    p_b = partial_trace(p_ab, outer_dim=2, inner_dim=d, keep="outer")
    return BlockEmbedding(DensityMatrix(p_ab), DensityMatrix(p_a), DensityMatrix(p_b))


def product_state(p_a: DensityMatrix, p_b: DensityMatrix) -> DensityMatrix:
    """P_A (x) P_B laid out with the B factor in the outer slot (matches block_embed)."""
    return DensityMatrix(kron(p_b.matrix, p_a.matrix))


def make_generator(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator."""
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for trial ``index`` of a campaign with ``master_seed``."""
    sequence = np.random.SeedSequence([int(master_seed), int(index)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def random_density(config: SamplerConfig) -> DensityMatrix:
    """
    Ginibre sample G G^dagger / Tr(G G^dagger) with G of shape dim x rank.

    Full rank gives the Hilbert-Schmidt measure; rank 1 gives pure states.
    """
    rng = make_generator(config.seed)
    shape = (config.dim, config.effective_rank)
    ginibre = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    product = ginibre @ ginibre.conj().T
    return DensityMatrix(product / np.trace(product).real)


def random_bloch(seed: int) -> BlochVector:
    """Uniform sample from the closed unit ball by rejection from [-1, 1]^3."""
    rng = make_generator(seed)
    while True:
        candidate = rng.uniform(-1.0, 1.0, size=3)
        if float(np.dot(candidate, candidate)) <= 1.0:
            return BlochVector(tuple(candidate))


def random_unitary(dim: int, seed: int) -> np.ndarray:
    """Eigenvector matrix of a random Hermitian matrix."""
    rng = make_generator(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianMatrix(g + g.conj().T).eig.eigenvectors


def parse_state_document(document: Dict[str, Any]) -> DensityMatrix:
    """
    Build a state from a decoded state document.

    Accepted forms are {"bloch": [w1, w2, w3]} and
    {"matrix": {"re": [[...]], "im": [[...]]}} ("im" may be omitted).

    Raises:
        StateFileError: If the document is malformed or the state is invalid
    """
    if not isinstance(document, dict):
        raise StateFileError("State document must be a JSON object")

    try:
        if "bloch" in document:
            return from_bloch(tuple(float(c) for c in document["bloch"]))
        if "matrix" in document:
            block = document["matrix"]
            real = np.asarray(block["re"], dtype=float)
            imag = np.asarray(block.get("im", np.zeros_like(real)), dtype=float)
            if real.shape != imag.shape:
                raise StateFileError(f"re/im shapes differ: {real.shape} vs {imag.shape}")
            return DensityMatrix(real + 1j * imag)
    except StateFileError:
        raise
    except (DomainError, KeyError, TypeError, ValueError) as e:
        raise StateFileError(f"Invalid state document: {e}") from e

    raise StateFileError("State document needs a 'bloch' or 'matrix' entry")


def load_state_file(path: Union[str, Path]) -> DensityMatrix:
    """
    Load a state from a JSON file.

    Raises:
        StateFileError: If the file is missing, not JSON, or not a valid state
    """
    path = Path(path)
    try:
        with open(path, "r") as f:
            document = json.load(f)
    except FileNotFoundError as e:
        raise StateFileError(f"State file not found: {path}") from e
    except (OSError, json.JSONDecodeError) as e:
        raise StateFileError(f"Could not read state file {path}: {e}") from e

    state = parse_state_document(document)
    logger.debug("Loaded %r from %s", state, path)
    return state


def state_to_json(rho: DensityMatrix, prefer_bloch: bool = True) -> Dict[str, Any]:
    """Serialise a state in the state file format; qubits use the Bloch form."""
    if prefer_bloch and rho.dim == 2:
        return {"bloch": list(to_bloch(rho).w)}
    return {"matrix": {"re": rho.entries.real.tolist(), "im": rho.entries.imag.tolist()}}
