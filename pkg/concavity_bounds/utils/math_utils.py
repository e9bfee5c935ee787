"""
Closed-form qubit formulas in Bloch-vector coordinates.

Every qubit state is rho = (I + w.sigma) / 2, so each functional reduces to
scalar expressions in |w| and dot products. These formulas serve as an
independent cross-check of the matrix routines.
"""

import math
from typing import Dict, Tuple

from scipy.special import xlogy

Vector3 = Tuple[float, float, float]

# Kim bounds are not evaluated for |1 - 2x| below this
KIM_EXCLUSION = 1e-4


def dot_product_3d(v1: Vector3, v2: Vector3) -> float:
    """
    Calculate dot product of two 3D vectors.

    Args:
        v1: First vector (x, y, z)
        v2: Second vector (x, y, z)

    Returns:
        Dot product (scalar)
    """
    return v1[0] * v2[0] + v1[1] * v2[1] + v1[2] * v2[2]


def vector_norm_3d(vector: Vector3) -> float:
    """Euclidean length of a 3D vector."""
    return math.sqrt(dot_product_3d(vector, vector))


def distance_3d(point1: Vector3, point2: Vector3) -> float:
    """
    Calculate 3D distance between two points.

    Args:
        point1: First point (x, y, z)
        point2: Second point (x, y, z)

    Returns:
        Euclidean distance
    """
    dx = point2[0] - point1[0]
    dy = point2[1] - point1[1]
    dz = point2[2] - point1[2]

    return math.sqrt(dx * dx + dy * dy + dz * dz)


def normalize_vector_3d(vector: Vector3) -> Vector3:
    """
    Normalize a 3D vector.

    Raises:
        ValueError: If vector has zero length
    """
    length = vector_norm_3d(vector)

    if length < 1e-12:
        raise ValueError("Cannot normalize zero-length vector")

    return (vector[0] / length, vector[1] / length, vector[2] / length)


def combine_vectors_3d(weight: float, v1: Vector3, v2: Vector3) -> Vector3:
    """Return weight * v1 + (1 - weight) * v2."""
    return tuple(weight * a + (1.0 - weight) * b for a, b in zip(v1, v2))


def _clamp_radius(w: Vector3) -> float:
    # pure states computed from rounded data can land a hair outside the ball
    return min(vector_norm_3d(w), 1.0)


def binary_entropy_scalar(p: float) -> float:
    """-p log p - (1-p) log(1-p) with 0 log 0 = 0."""
    return float(-xlogy(p, p) - xlogy(1.0 - p, 1.0 - p))


def qubit_eigenvalues(w: Vector3) -> Tuple[float, float]:
    """Ascending eigenvalues (1 - |w|)/2, (1 + |w|)/2."""
    r = _clamp_radius(w)
    return (0.5 * (1.0 - r), 0.5 * (1.0 + r))


def qubit_entropy(w: Vector3) -> float:
    return binary_entropy_scalar(0.5 * (1.0 + _clamp_radius(w)))


def qubit_log_coefficients(w: Vector3) -> Tuple[float, float]:
    """
    Coefficients (alpha, beta) with log rho = alpha I + beta w.sigma.

    Raises:
        ValueError: If the state is pure (log rho is then unbounded)
    """
    r = vector_norm_3d(w)
    if r >= 1.0:
        raise ValueError("log of a pure qubit state is undefined on its kernel")
    alpha = 0.5 * math.log((1.0 - r * r) / 4.0)
    beta = 0.0 if r < 1e-15 else math.atanh(r) / r
    return alpha, beta


def qubit_sqrt_coefficients(w: Vector3) -> Tuple[float, float]:
    """Coefficients (p, q) with sqrt(rho) = p I + q w.sigma."""
    r = _clamp_radius(w)
    upper = math.sqrt(0.5 * (1.0 + r))
    lower = math.sqrt(0.5 * (1.0 - r))
    p = 0.5 * (upper + lower)
    # the limit r -> 0 of (upper - lower) / (2r) is 1/sqrt(2) / 2
    q = 0.5 / math.sqrt(2.0) if r < 1e-12 else (upper - lower) / (2.0 * r)
    return p, q


def qubit_relative_entropy(w: Vector3, v: Vector3) -> float:
    """Relative entropy H(rho_w, rho_v) for a full-rank rho_v."""
    alpha, beta = qubit_log_coefficients(v)
    return -qubit_entropy(w) - (alpha + beta * dot_product_3d(w, v))


def qubit_trace_distance(w: Vector3, v: Vector3) -> float:
    """||rho_w - rho_v||_1 = |w - v|."""
    return distance_3d(w, v)


def qubit_fidelity(w: Vector3, v: Vector3) -> float:
    """Root fidelity Tr (sqrt(rho) gamma sqrt(rho))^(1/2)."""
    rw = _clamp_radius(w)
    rv = _clamp_radius(v)
    squared = 0.5 * (1.0 + dot_product_3d(w, v) + math.sqrt((1.0 - rw * rw) * (1.0 - rv * rv)))
    return math.sqrt(min(max(squared, 0.0), 1.0))


def qubit_hellinger_affinity(w: Vector3, v: Vector3) -> float:
    """Tr sqrt(rho_w) sqrt(rho_v)."""
    p1, q1 = qubit_sqrt_coefficients(w)
    p2, q2 = qubit_sqrt_coefficients(v)
    return 2.0 * (p1 * p2 + q1 * q2 * dot_product_3d(w, v))


def qubit_mixture_bounds(w1: Vector3, w2: Vector3, x: float) -> Dict[str, float]:
    """
    Evaluate the concavity gap and the main bounds for a qubit mixture.

    Args:
        w1: Bloch vector of the first state
        w2: Bloch vector of the second state
        x: Weight of the first state

    Returns:
        Dictionary with gap, pinsker, carlen_lieb, block_pinsker,
        binary_entropy, rfz_bures, rfz_trace, rfz_purified, audenaert, and kim
        and kim_min unless |1 - 2x| < KIM_EXCLUSION
    """
    average = combine_vectors_3d(x, w1, w2)
    reverse = combine_vectors_3d(x, w2, w1)
    distance = qubit_trace_distance(w1, w2)
    h = binary_entropy_scalar(x)

    gap = qubit_entropy(average) - x * qubit_entropy(w1) - (1.0 - x) * qubit_entropy(w2)
    affinity = (x * qubit_hellinger_affinity(w1, average)
                + (1.0 - x) * qubit_hellinger_affinity(w2, average))

    values = {
        "gap": gap,
        "pinsker": 0.5 * x * (1.0 - x) * distance ** 2,
        "carlen_lieb": -2.0 * math.log(affinity),
        "block_pinsker": 2.0 * x ** 2 * (1.0 - x) ** 2 * distance ** 2,
        "binary_entropy": h,
        "rfz_trace": h * distance,
        "audenaert": h * 0.5 * distance,
    }
    root_fidelity = qubit_fidelity(w1, w2)
    values["rfz_bures"] = h * 2.0 * (1.0 - root_fidelity)
    values["rfz_purified"] = h * math.sqrt(max(1.0 - root_fidelity ** 2, 0.0))
    if abs(1.0 - 2.0 * x) >= KIM_EXCLUSION:
        forward = qubit_relative_entropy(average, reverse)
        backward = qubit_relative_entropy(reverse, average)
        prefactor = x * (1.0 - x) / (1.0 - 2.0 * x) ** 2
        values["kim"] = prefactor * max(forward, backward)
        values["kim_min"] = prefactor * min(forward, backward)
    return values
