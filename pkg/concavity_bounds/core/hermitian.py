"""
Dense complex-Hermitian linear algebra: eigendecomposition, matrix functions
restricted to the support, trace norm, Kronecker products and partial traces.
"""

import logging
import numbers
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConvergenceError, DimensionError, DomainError, NotPositiveSemidefinite

logger = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-12
JACOBI_TOLERANCE = 1e-14
JACOBI_MAX_SWEEPS = 100

ArrayLike = Union[np.ndarray, Sequence[Sequence[complex]]]
ScalarFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SupportPolicy:
    """Thresholds deciding which eigenvalues count as zero."""
    zero_threshold: float = 1e-12
    negative_tolerance: float = 1e-10

    def __post_init__(self) -> None:
        if not self.zero_threshold >= 0.0:
            raise DomainError(f"zero_threshold must be >= 0, got {self.zero_threshold}")
        if not self.negative_tolerance >= 0.0:
            raise DomainError(f"negative_tolerance must be >= 0, got {self.negative_tolerance}")

    def retained(self, eigenvalues: np.ndarray) -> np.ndarray:
        """Mask of eigenvalues that survive the threshold."""
        return np.abs(eigenvalues) > self.zero_threshold

    def positive(self, eigenvalues: np.ndarray) -> np.ndarray:
        """Mask of eigenvalues strictly above the threshold."""
        return eigenvalues > self.zero_threshold


DEFAULT_POLICY = SupportPolicy()


@dataclass(frozen=True)
class EigenDecomposition:
    """
    Spectral decomposition H = V diag(eigenvalues) V^dagger.

    Eigenvalues are ascending; column k of ``eigenvectors`` belongs to
    eigenvalue k.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Rebuild V diag(values) V^dagger.

        Args:
            values: Replacement eigenvalues, defaults to the stored ones

        Returns:
            Dense complex matrix
        """
        if values is None:
            values = self.eigenvalues
        vectors = self.eigenvectors
        return (vectors * values) @ vectors.conj().T


class HermitianMatrix:
    """
    Immutable dense complex Hermitian matrix.

    The input is symmetrised on construction by averaging it with its
    conjugate transpose. The eigendecomposition is computed once and cached.
    """

    # numpy scalars defer to __rmul__ instead of broadcasting
    __array_ufunc__ = None

    def __init__(self, entries: ArrayLike):
        array = np.array(entries, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
            raise DimensionError(f"Expected a non-empty square matrix, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise DomainError("Matrix entries must be finite")

        asymmetry = np.max(np.abs(array - array.conj().T))
        if asymmetry > HERMITIAN_TOLERANCE:
            logger.debug("Symmetrising input with max asymmetry %.3e", asymmetry)

        array = 0.5 * (array + array.conj().T)
        array.setflags(write=False)
        self._entries = array

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianMatrix":
        return cls(np.zeros((dim, dim), dtype=complex))

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "HermitianMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def block_diagonal(cls, blocks: Sequence["HermitianMatrix"]) -> "HermitianMatrix":
        """
        diag(B_1, ..., B_k), with its eigendecomposition assembled from the blocks.
        """
        sizes = [block.dim for block in blocks]
        total = sum(sizes)
        entries = np.zeros((total, total), dtype=complex)
        vectors = np.zeros((total, total), dtype=complex)
        start = 0
        for block, size in zip(blocks, sizes):
            entries[start:start + size, start:start + size] = block.entries
            vectors[start:start + size, start:start + size] = block.eig.eigenvectors
            start += size
        values = np.concatenate([block.eig.eigenvalues for block in blocks])
        return cls(entries)._with_eig(values, vectors)

    def _with_eig(self, values: np.ndarray, vectors: np.ndarray) -> "HermitianMatrix":
        order = np.argsort(values, kind="stable")
        self.__dict__["eig"] = EigenDecomposition(values[order], vectors[:, order])
        return self

    @property
    def entries(self) -> np.ndarray:
        """Read-only view of the matrix entries."""
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @cached_property
    def eig(self) -> EigenDecomposition:
        """Cached eigendecomposition (cyclic Jacobi)."""
        values, vectors = jacobi_eigh(self._entries)
        return EigenDecomposition(values, vectors)

    def trace(self) -> float:
        return float(np.trace(self._entries).real)

    def conjugate_by(self, unitary: np.ndarray) -> "HermitianMatrix":
        """Return U H U^dagger."""
        return HermitianMatrix(unitary @ self._entries @ unitary.conj().T)

    def allclose(self, other: "HermitianMatrix", atol: float = 1e-12) -> bool:
        if self.dim != other.dim:
            return False
        return bool(np.max(np.abs(self._entries - other._entries)) <= atol)

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        _require_same_dim(self, other)
        return HermitianMatrix(self._entries + other._entries)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        _require_same_dim(self, other)
        return HermitianMatrix(self._entries - other._entries)

    def __neg__(self) -> "HermitianMatrix":
        return HermitianMatrix(-self._entries)

    def __mul__(self, scalar: float) -> "HermitianMatrix":
        # complex scalars would break Hermiticity
        if not isinstance(scalar, numbers.Real):
            return NotImplemented
        scaled = HermitianMatrix(float(scalar) * self._entries)
        if "eig" in self.__dict__ and scalar >= 0:
            scaled._with_eig(float(scalar) * self.eig.eigenvalues, self.eig.eigenvectors)
        return scaled

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"HermitianMatrix(dim={self.dim})"


def _require_same_dim(a: HermitianMatrix, b: HermitianMatrix) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"Dimension mismatch: {a.dim} vs {b.dim}")


def _off_diagonal_norm(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix - np.diag(np.diag(matrix))))


def _round_robin(n: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Split all index pairs p < q into n - 1 (or n) rounds of disjoint pairs.

    Circle-method tournament; with odd n one index sits out each round.
    """
    players = list(range(n + n % 2))
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [(min(players[i], players[m - 1 - i]), max(players[i], players[m - 1 - i]))
                 for i in range(m // 2)]
        pairs = [pair for pair in pairs if pair[1] < n]
        if pairs:
            p, q = (np.array(side) for side in zip(*pairs))
            rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(matrix: np.ndarray,
                tolerance: float = JACOBI_TOLERANCE,
                max_sweeps: int = JACOBI_MAX_SWEEPS) -> tuple:
    """
    Diagonalise a complex Hermitian matrix with cyclic Jacobi rotations.

    Each (p, q) rotation first removes the phase of the off-diagonal entry,
    then applies the real symmetric Jacobi rotation that annihilates it.
    A sweep visits every pair once, in rounds of disjoint pairs whose
    rotations commute and are applied together.

    Args:
        matrix: Hermitian input (not modified)
        tolerance: Off-diagonal Frobenius norm at which iteration stops,
            scaled by max(1, ||H||_F)
        max_sweeps: Maximum number of full cyclic sweeps

    Returns:
        Tuple of (ascending eigenvalues, unitary eigenvector matrix)

    Raises:
        ConvergenceError: If the sweep budget is exhausted
    """
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    vectors = np.eye(n, dtype=complex)
    threshold = tolerance * max(1.0, float(np.linalg.norm(a)))
    rounds = _round_robin(n)

    for sweep in range(max_sweeps + 1):
        off = _off_diagonal_norm(a)
        if off <= threshold:
            break
        if sweep == max_sweeps:
            raise ConvergenceError(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3e})")

        for p, q in rounds:
            apq = a[p, q]
            magnitude = np.abs(apq)
            active = magnitude > 0.0
            if not np.any(active):
                continue
            safe = np.where(active, magnitude, 1.0)

            tau = (a[q, q].real - a[p, p].real) / (2.0 * safe)
            with np.errstate(over="ignore"):
                t = np.where(np.abs(tau) > 1e150, 0.5 / tau,
                             np.copysign(1.0, tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau)))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            phase = np.where(active, np.conj(apq) / safe, 1.0)

            # columns: [a_p, a_q] @ [[c, s], [-s e, c e]]
            col_p, col_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = col_p * c - col_q * (s * phase)
            a[:, q] = col_p * s + col_q * (c * phase)
            # rows: the conjugate transpose from the left
            row_p, row_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * row_p - (s * np.conj(phase))[:, None] * row_q
            a[q, :] = s[:, None] * row_p + (c * np.conj(phase))[:, None] * row_q
            a[p[active], q[active]] = 0.0
            a[q[active], p[active]] = 0.0

            vec_p, vec_q = vectors[:, p].copy(), vectors[:, q].copy()
            vectors[:, p] = vec_p * c - vec_q * (s * phase)
            vectors[:, q] = vec_p * s + vec_q * (c * phase)

    eigenvalues = np.real(np.diag(a)).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], vectors[:, order]


def eig_hermitian(h: HermitianMatrix) -> EigenDecomposition:
    """Eigendecomposition with ascending eigenvalues."""
    return h.eig


def psd_spectrum(h: HermitianMatrix, policy: SupportPolicy = DEFAULT_POLICY) -> np.ndarray:
    """
    Eigenvalues of an intended positive semidefinite matrix.

    Eigenvalues in [-negative_tolerance, 0) are clamped to 0; clamps larger
    than the zero threshold are logged as warnings.

    Raises:
        NotPositiveSemidefinite: If an eigenvalue is more negative than the tolerance
    """
    values = h.eig.eigenvalues
    if values[0] < -policy.negative_tolerance:
        raise NotPositiveSemidefinite(
            f"Matrix has eigenvalue {values[0]:.3e} below -{policy.negative_tolerance:g}")
    if values[0] < -policy.zero_threshold:
        logger.warning("Clamped negative eigenvalue %.3e of a dim-%d matrix to 0", values[0], h.dim)
    elif values[0] < 0.0:
        logger.debug("Clamped roundoff eigenvalue %.3e to 0", values[0])
    return np.where(values < 0.0, 0.0, values)


def matrix_function(h: HermitianMatrix,
                    f: ScalarFunction,
                    policy: SupportPolicy = DEFAULT_POLICY,
                    psd: bool = False) -> HermitianMatrix:
    """
    Apply a scalar function to the retained spectrum of a Hermitian matrix.

    Eigenvalues with |lambda| <= zero_threshold are mapped to 0 regardless of f.

    Args:
        h: Input matrix
        f: Vectorised real function of the eigenvalues
        policy: Support policy
        psd: Clamp small negative eigenvalues first (see psd_spectrum)

    Returns:
        V diag(f(lambda)) V^dagger on the support, 0 elsewhere

    Raises:
        DomainError: If f is undefined at a retained eigenvalue
    """
    decomposition = h.eig
    values = psd_spectrum(h, policy) if psd else decomposition.eigenvalues
    keep = policy.retained(values)

    mapped = np.zeros_like(values)
    if np.any(keep):
        with np.errstate(all="ignore"):
            result = np.asarray(f(values[keep]))
        if np.iscomplexobj(result):
            invalid = np.ones(result.shape, dtype=bool)
        else:
            invalid = ~np.isfinite(result)
        if np.any(invalid):
            bad = values[keep][invalid]
            raise DomainError(f"Function undefined at retained eigenvalue(s) {bad.tolist()}")
        mapped[keep] = result

    return HermitianMatrix(decomposition.reconstruct(mapped))


def matrix_power(h: HermitianMatrix,
                 exponent: float,
                 policy: SupportPolicy = DEFAULT_POLICY,
                 psd: bool = True) -> HermitianMatrix:
    """Power on the support; negative exponents give the pseudo-inverse power."""
    return matrix_function(h, lambda lam: np.power(lam, exponent), policy, psd=psd)


def matrix_sqrt(h: HermitianMatrix, policy: SupportPolicy = DEFAULT_POLICY) -> HermitianMatrix:
    return matrix_function(h, np.sqrt, policy, psd=True)


def matrix_log(h: HermitianMatrix, policy: SupportPolicy = DEFAULT_POLICY) -> HermitianMatrix:
    return matrix_function(h, np.log, policy)


def support_projector(h: HermitianMatrix, policy: SupportPolicy = DEFAULT_POLICY) -> HermitianMatrix:
    """Projector onto eigenvectors with eigenvalue above the threshold."""
    decomposition = h.eig
    mask = policy.positive(decomposition.eigenvalues).astype(float)
    return HermitianMatrix(decomposition.reconstruct(mask))


def trace_norm(h: HermitianMatrix) -> float:
    """Sum of absolute eigenvalues."""
    return float(np.sum(np.abs(h.eig.eigenvalues)))


def kron(a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    """Kronecker product with ``a`` in the outer slot; its spectrum comes from the factors."""
    product = HermitianMatrix(np.kron(a.entries, b.entries))
    return product._with_eig(np.kron(a.eig.eigenvalues, b.eig.eigenvalues),
                             np.kron(a.eig.eigenvectors, b.eig.eigenvectors))


def partial_trace(h: HermitianMatrix, outer_dim: int, inner_dim: int, keep: str = "inner") -> HermitianMatrix:
    """
    Partial trace of a matrix laid out as outer (x) inner.

    Args:
        h: Matrix of dimension outer_dim * inner_dim
        outer_dim: Dimension of the outer tensor slot
        inner_dim: Dimension of the inner tensor slot
        keep: Which factor survives, "inner" or "outer"

    Returns:
        Reduced matrix on the kept factor
    """
    if h.dim != outer_dim * inner_dim:
        raise DimensionError(f"Cannot split dim {h.dim} as {outer_dim} x {inner_dim}")

    blocks = h.entries.reshape(outer_dim, inner_dim, outer_dim, inner_dim)
    if keep == "inner":
        return HermitianMatrix(np.einsum("aiaj->ij", blocks))
    if keep == "outer":
        return HermitianMatrix(np.einsum("iaja->ij", blocks))
    raise ValueError(f"Unknown factor to keep: {keep}")
