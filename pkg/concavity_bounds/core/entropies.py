"""
Entropy and divergence functionals on density matrices.

All values are in nats. Divergences return ``math.inf`` when the support
condition they need fails; they never regularise the second argument.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import entr, rel_entr

from .errors import DimensionError, DomainError
from .hermitian import HermitianMatrix, matrix_power, matrix_sqrt, psd_spectrum, trace_norm
from .states import DensityMatrix

logger = logging.getLogger(__name__)

# Finite float or math.inf, never NaN.
ExtendedReal = float

SUPPORT_TOLERANCE = 1e-10
PARAMETER_EXCLUSION = 1e-9
STANDARD = "standard"
SANDWICHED = "sandwiched"
FLAVORS = (STANDARD, SANDWICHED)


@dataclass(frozen=True)
class RenyiParam:
    """Renyi order a > 0 with a != 1, tagged with the divergence family."""
    a: float
    flavor: str = STANDARD

    def __post_init__(self) -> None:
        if self.flavor not in FLAVORS:
            raise DomainError(f"Unknown Renyi flavor: {self.flavor}")
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DomainError(f"Renyi order must be a positive real, got {self.a}")
        if abs(self.a - 1.0) <= PARAMETER_EXCLUSION:
            raise DomainError(
                f"Renyi order {self.a} is within {PARAMETER_EXCLUSION:g} of 1; "
                "use relative_entropy for the limit")


def _as_param(a: Union[float, RenyiParam], flavor: str) -> RenyiParam:
    if isinstance(a, RenyiParam):
        if a.flavor != flavor:
            raise DomainError(f"Expected a {flavor} Renyi parameter, got {a.flavor}")
        return a
    return RenyiParam(float(a), flavor)


def _require_same_dim(rho: DensityMatrix, gamma: DensityMatrix) -> None:
    if rho.dim != gamma.dim:
        raise DimensionError(f"State dimensions differ: {rho.dim} vs {gamma.dim}")


def _log_of_trace(q: float, a: float) -> ExtendedReal:
    # q <= 0 only happens for a < 1 with orthogonal supports
    if q <= 0.0:
        return math.inf
    return math.log(q) / (a - 1.0)


def _overlaps(rho: DensityMatrix, gamma: DensityMatrix) -> np.ndarray:
    """|<u_i|v_j>|^2 between the eigenbases of rho and gamma."""
    return np.abs(rho.eigenvectors.conj().T @ gamma.eigenvectors) ** 2


def support_contained(rho: DensityMatrix, gamma: DensityMatrix) -> bool:
    """
    True when support(rho) lies inside support(gamma).

    Tests ||(I - P) rho (I - P)||_1 <= 1e-10 with P the support projector of
    gamma. (I - P) rho (I - P) is positive semidefinite, so its trace norm
    equals its trace.
    """
    _require_same_dim(rho, gamma)
    keep = gamma.policy.positive(gamma.spectrum)
    kernel = gamma.eigenvectors[:, ~keep]
    if kernel.shape[1] == 0:
        return True
    leaked = float(np.real(np.trace(kernel.conj().T @ rho.entries @ kernel)))
    return leaked <= SUPPORT_TOLERANCE


def von_neumann(rho: DensityMatrix) -> float:
    """S(rho) = -Tr rho log rho with 0 log 0 = 0."""
    values = rho.spectrum
    values = values[rho.policy.positive(values)]
    return float(np.sum(entr(values)))


def relative_entropy(rho: DensityMatrix, gamma: DensityMatrix) -> ExtendedReal:
    """
    H(rho, gamma) = Tr rho (log rho - log gamma).

    Returns:
        The relative entropy, or inf when support(rho) is not inside support(gamma)
    """
    if not support_contained(rho, gamma):
        return math.inf

    keep = gamma.policy.positive(gamma.spectrum)
    vectors = gamma.eigenvectors[:, keep]
    weights = np.real(np.einsum("ij,ik,kj->j", vectors.conj(), rho.entries, vectors))
    cross = float(np.dot(weights, np.log(gamma.spectrum[keep])))
    return -von_neumann(rho) - cross


def renyi(a: Union[float, RenyiParam], rho: DensityMatrix, gamma: DensityMatrix) -> ExtendedReal:
    """
    Standard Renyi divergence (1/(a-1)) log Tr rho^a gamma^(1-a).

    For a > 1 the negative power of gamma is the pseudo-inverse power and the
    result is inf when support(rho) is not inside support(gamma).
    """
    param = _as_param(a, STANDARD)
    _require_same_dim(rho, gamma)
    order = param.a
    if order > 1.0 and not support_contained(rho, gamma):
        return math.inf

    keep_rho = rho.policy.positive(rho.spectrum)
    keep_gamma = gamma.policy.positive(gamma.spectrum)
    overlap = _overlaps(rho, gamma)[np.ix_(keep_rho, keep_gamma)]
    left = rho.spectrum[keep_rho] ** order
    right = gamma.spectrum[keep_gamma] ** (1.0 - order)
    return _log_of_trace(float(left @ overlap @ right), order)


def sandwiched(a: Union[float, RenyiParam], rho: DensityMatrix, gamma: DensityMatrix) -> ExtendedReal:
    """
    Sandwiched Renyi divergence
    (1/(a-1)) log Tr (gamma^((1-a)/2a) rho gamma^((1-a)/2a))^a.

    Raises:
        DomainError: For a < 1/2
    """
    param = _as_param(a, SANDWICHED)
    _require_same_dim(rho, gamma)
    order = param.a
    if order < 0.5:
        raise DomainError(f"Sandwiched Renyi divergence needs a >= 1/2, got {order}")
    if order > 1.0 and not support_contained(rho, gamma):
        return math.inf

    sandwich = matrix_power(gamma.matrix, (1.0 - order) / (2.0 * order), gamma.policy)
    inner = HermitianMatrix(sandwich.entries @ rho.entries @ sandwich.entries)
    values = psd_spectrum(inner, rho.policy)
    values = values[rho.policy.positive(values)]
    return _log_of_trace(float(np.sum(values ** order)), order)


def max_relative(rho: DensityMatrix, gamma: DensityMatrix) -> ExtendedReal:
    """H_max(rho, gamma) = log lambda_max(gamma^(-1/2) rho gamma^(-1/2))."""
    _require_same_dim(rho, gamma)
    if not support_contained(rho, gamma):
        return math.inf

    inverse_root = matrix_power(gamma.matrix, -0.5, gamma.policy)
    inner = HermitianMatrix(inverse_root.entries @ rho.entries @ inverse_root.entries)
    return math.log(float(inner.eig.eigenvalues[-1]))


def fidelity(rho: DensityMatrix, gamma: DensityMatrix) -> float:
    """Root fidelity Tr (sqrt(rho) gamma sqrt(rho))^(1/2), clipped to [0, 1]."""
    _require_same_dim(rho, gamma)
    root = matrix_sqrt(rho.matrix, rho.policy)
    inner = HermitianMatrix(root.entries @ gamma.entries @ root.entries)
    value = float(np.sum(np.sqrt(psd_spectrum(inner, rho.policy))))
    return min(max(value, 0.0), 1.0)


def bures_sq(rho: DensityMatrix, gamma: DensityMatrix) -> float:
    """Squared Bures distance 2 (1 - fidelity)."""
    return 2.0 * (1.0 - fidelity(rho, gamma))


def hellinger_affinity(rho: DensityMatrix, gamma: DensityMatrix) -> float:
    """Tr sqrt(rho) sqrt(gamma), clipped to [0, 1]."""
    _require_same_dim(rho, gamma)
    roots = np.sqrt(rho.spectrum) @ _overlaps(rho, gamma) @ np.sqrt(gamma.spectrum)
    return min(max(float(roots), 0.0), 1.0)


def trace_distance(rho: DensityMatrix, gamma: DensityMatrix) -> float:
    """||rho - gamma||_1 (not halved)."""
    _require_same_dim(rho, gamma)
    return trace_norm(rho.matrix - gamma.matrix)


def binary_entropy(x: float) -> float:
    """
    h(x) = -x log x - (1-x) log(1-x).

    Raises:
        DomainError: If x lies outside [0, 1]
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"Binary entropy needs x in [0, 1], got {x}")
    return float(entr(x) + entr(1.0 - x))


# Classical forms, used as oracles for commuting pairs.

def shannon_entropy(p: Sequence[float]) -> float:
    return float(np.sum(entr(np.asarray(p, dtype=float))))


def kl_divergence(p: Sequence[float], q: Sequence[float]) -> ExtendedReal:
    return float(np.sum(rel_entr(np.asarray(p, dtype=float), np.asarray(q, dtype=float))))


def classical_renyi(a: float, p: Sequence[float], q: Sequence[float]) -> ExtendedReal:
    """(1/(a-1)) log sum_i p_i^a q_i^(1-a) over the support of p."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0.0
    if a > 1.0 and np.any(q[mask] <= 0.0):
        return math.inf
    both = mask & (q > 0.0)
    return _log_of_trace(float(np.sum(p[both] ** a * q[both] ** (1.0 - a))), a)
