"""
The concavity gap of the von Neumann entropy and the bounds that bracket it.

A mixture problem (x, rho1, rho2) has gap S(rho_Av) - x S(rho1) - (1-x) S(rho2).
Lower bounds:
    lowbd0 (Kim)          x(1-x)/(1-2x)^2 max{H(rho_Av, rho_Rev), H(rho_Rev, rho_Av)}
    Kim, min form         the same prefactor times the min of the two relative entropies
    lowbd1 (Pinsker)      1/2 x(1-x) ||rho1 - rho2||_1^2
    lowbd2 (Carlen-Lieb)  -2 log Tr[(x sqrt(rho1) + (1-x) sqrt(rho2)) sqrt(rho_Av)]
    block Pinsker         1/2 ||P_AB - P_A (x) P_B||_1^2
Upper bounds:
    binary entropy        h(x)
    RFZ                   h(x) D^2_Bures(rho1, rho2) and h(x) ||rho1 - rho2||_1
    RFZ, purified form    h(x) sqrt(1 - F(rho1, rho2)^2)
    Audenaert             h(x) 1/2 ||rho1 - rho2||_1

The max form of the Kim bound and the squared-Bures RFZ form are reported
but fail on ordinary qubit pairs, so their relations with the gap are
advisory. The min form and the purified form are the ones the chain gates on.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from ..utils.math_utils import KIM_EXCLUSION
from .entropies import binary_entropy, fidelity, relative_entropy, renyi, sandwiched, von_neumann
from .errors import DomainError, IndeterminateAtHalf, RouteMismatchError
from .hermitian import HermitianMatrix, matrix_power, matrix_sqrt, trace_norm
from .states import DensityMatrix, MixtureProblem

logger = logging.getLogger(__name__)

CHAIN_TOLERANCE = 1e-9
CONCAVITY_TOLERANCE = 1e-10
ROUTE_TOLERANCE = 1e-9
COMPARISON_MARGIN = 1e-9

LOWER_BOUND_LABELS = {"lowbd0": "kim", "lowbd1": "pinsker", "lowbd2": "carlen_lieb"}
TIE = "tie"
NOT_APPLICABLE = "n/a"
KIM_NOT_EVALUATED = "kim: not evaluated at x ≈ ½"


def concavity_gap(problem: MixtureProblem) -> float:
    """S(rho_Av) - x S(rho1) - (1-x) S(rho2)."""
    x = problem.x
    return (von_neumann(problem.rho_av)
            - x * von_neumann(problem.rho1)
            - (1.0 - x) * von_neumann(problem.rho2))


def gap_via_relent(problem: MixtureProblem) -> float:
    """x H(rho1, rho_Av) + (1-x) H(rho2, rho_Av); finite since both supports sit inside rho_Av's."""
    x = problem.x
    return (x * relative_entropy(problem.rho1, problem.rho_av)
            + (1.0 - x) * relative_entropy(problem.rho2, problem.rho_av))


def block_identity(problem: MixtureProblem) -> float:
    """H(P_AB, P_A (x) P_B) for the block embedding of the mixture."""
    return relative_entropy(problem.embedding.p_ab, problem.product)


def subadditivity_form(problem: MixtureProblem) -> float:
    """S(P_A) + S(P_B) - S(P_AB)."""
    embedding = problem.embedding
    return von_neumann(embedding.p_a) + von_neumann(embedding.p_b) - von_neumann(embedding.p_ab)


def _kim_prefactor_and_entropies(problem: MixtureProblem) -> Tuple[float, float, float]:
    x = problem.x
    if abs(1.0 - 2.0 * x) < KIM_EXCLUSION:
        raise IndeterminateAtHalf(f"Kim bound is indeterminate at x = {x} (|1 - 2x| < {KIM_EXCLUSION:g})")
    forward = relative_entropy(problem.rho_av, problem.rho_rev)
    backward = relative_entropy(problem.rho_rev, problem.rho_av)
    return x * (1.0 - x) / (1.0 - 2.0 * x) ** 2, forward, backward


def kim_lower(problem: MixtureProblem) -> float:
    """
    lowbd0: x(1-x)/(1-2x)^2 max{H(rho_Av, rho_Rev), H(rho_Rev, rho_Av)}.

    This form can exceed the gap (for instance on random qubit pairs at
    x = 0.8); use ``kim_min_lower`` where a certified lower bound is needed.

    Raises:
        IndeterminateAtHalf: If |1 - 2x| < 1e-4 (the prefactor diverges while
            both relative entropies vanish)
    """
    prefactor, forward, backward = _kim_prefactor_and_entropies(problem)
    return prefactor * max(forward, backward)


def kim_min_lower(problem: MixtureProblem) -> float:
    """
    x(1-x)/(1-2x)^2 min{H(rho_Av, rho_Rev), H(rho_Rev, rho_Av)}.

    Never below the Pinsker bound, since each relative entropy is at least
    1/2 (1-2x)^2 ||rho1 - rho2||_1^2.

    Raises:
        IndeterminateAtHalf: If |1 - 2x| < 1e-4
    """
    prefactor, forward, backward = _kim_prefactor_and_entropies(problem)
    return prefactor * min(forward, backward)


def pinsker_lower(problem: MixtureProblem) -> float:
    """lowbd1: 1/2 x(1-x) ||rho1 - rho2||_1^2."""
    x = problem.x
    return 0.5 * x * (1.0 - x) * problem.distance ** 2


def carlen_lieb_lower(problem: MixtureProblem) -> float:
    """lowbd2 in closed form: -2 log Tr[(x sqrt(rho1) + (1-x) sqrt(rho2)) sqrt(rho_Av)]."""
    x = problem.x
    roots = x * matrix_sqrt(problem.rho1.matrix) + (1.0 - x) * matrix_sqrt(problem.rho2.matrix)
    affinity = float(np.real(np.trace(roots.entries @ matrix_sqrt(problem.rho_av.matrix).entries)))
    return -2.0 * math.log(affinity)


class CarlenLiebRoutes(NamedTuple):
    closed_form: float
    block_renyi: float
    hellinger_form: float

    @property
    def spread(self) -> float:
        return max(self) - min(self)


def carlen_lieb_routes(problem: MixtureProblem) -> CarlenLiebRoutes:
    """
    Evaluate lowbd2 three ways.

    Returns:
        CarlenLiebRoutes with the closed form, the order-1/2 Renyi divergence
        H_1/2(P_AB, P_A (x) P_B) and -2 log[1 - 1/2 Tr(sqrt(P_AB) - sqrt(P_A (x) P_B))^2]
    """
    embedding = problem.embedding
    product = problem.product

    difference = matrix_sqrt(embedding.p_ab.matrix) - matrix_sqrt(product.matrix)
    squared = float(np.sum(np.abs(difference.entries) ** 2))

    return CarlenLiebRoutes(
        closed_form=carlen_lieb_lower(problem),
        block_renyi=renyi(0.5, embedding.p_ab, product),
        hellinger_form=-2.0 * math.log(1.0 - 0.5 * squared),
    )


class BlockPinskerRoutes(NamedTuple):
    block: float
    closed_form: float


def block_pinsker_routes(problem: MixtureProblem) -> BlockPinskerRoutes:
    """
    1/2 ||P_AB - P_A (x) P_B||_1^2 computed on the blocks and as 2x^2(1-x)^2 ||rho1 - rho2||_1^2.

    P_AB - P_A (x) P_B is block diagonal, so its trace norm is the sum of the
    trace norms of the two diagonal blocks.
    """
    d = problem.dim
    x = problem.x
    difference = problem.embedding.p_ab.entries - problem.product.entries
    norm = sum(trace_norm(HermitianMatrix(difference[k:k + d, k:k + d])) for k in (0, d))
    return BlockPinskerRoutes(
        block=0.5 * norm ** 2,
        closed_form=2.0 * x ** 2 * (1.0 - x) ** 2 * problem.distance ** 2,
    )


def block_pinsker_lower(problem: MixtureProblem) -> float:
    """
    Block Pinsker bound, evaluated on the block matrices.

    Raises:
        RouteMismatchError: If the block and closed-form routes differ by more than 1e-9
    """
    routes = block_pinsker_routes(problem)
    if abs(routes.block - routes.closed_form) > ROUTE_TOLERANCE:
        logger.warning("Block Pinsker routes disagree at x = %s: block %.12g vs closed form %.12g",
                       problem.x, routes.block, routes.closed_form)
        raise RouteMismatchError(
            f"Block Pinsker routes disagree: block {routes.block!r} vs closed form {routes.closed_form!r}")
    return routes.block


def classic_upper(problem: MixtureProblem) -> float:
    """h(x)."""
    return binary_entropy(problem.x)


class RfzBounds(NamedTuple):
    bures: float
    trace: float
    purified: float


def rfz_upper(problem: MixtureProblem) -> RfzBounds:
    """
    RFZ upper bounds from one fidelity evaluation.

    Returns:
        RfzBounds with h(x) D^2_Bures(rho1, rho2) = h(x) 2(1 - F),
        h(x) ||rho1 - rho2||_1 and h(x) sqrt(1 - F^2). Only the last one is
        a bound on the gap in general; it dominates the Audenaert bound.
    """
    h = binary_entropy(problem.x)
    root_fidelity = fidelity(problem.rho1, problem.rho2)
    return RfzBounds(bures=h * 2.0 * (1.0 - root_fidelity),
                     trace=h * problem.distance,
                     purified=h * math.sqrt(max(1.0 - root_fidelity ** 2, 0.0)))


def audenaert_upper(problem: MixtureProblem) -> float:
    """h(x) 1/2 ||rho1 - rho2||_1."""
    return binary_entropy(problem.x) * 0.5 * problem.distance


class RfzComparison(NamedTuple):
    rfz_trace: float
    classic: float
    distance: float
    rfz_looser: bool


def rfz_vs_classic(problem: MixtureProblem) -> RfzComparison:
    """The RFZ trace bound exceeds h(x) exactly when ||rho1 - rho2||_1 > 1."""
    distance = problem.distance
    classic = classic_upper(problem)
    rfz = classic * distance
    return RfzComparison(rfz_trace=rfz, classic=classic, distance=distance, rfz_looser=rfz > classic)


def renyi_lower_mixture(b: float, problem: MixtureProblem) -> float:
    """
    x H_b(rho1, rho_Av) + (1-x) H_b(rho2, rho_Av) for the standard Renyi family.

    Raises:
        DomainError: Unless 1/2 <= b < 1
    """
    if not 0.5 <= b < 1.0:
        raise DomainError(f"Renyi lower mixture needs b in [1/2, 1), got {b}")
    x = problem.x
    return (x * renyi(b, problem.rho1, problem.rho_av)
            + (1.0 - x) * renyi(b, problem.rho2, problem.rho_av))


def sandwiched_upper_mixture(a: float, problem: MixtureProblem) -> float:
    """
    x H~_a(rho1, rho_Av) + (1-x) H~_a(rho2, rho_Av) for the sandwiched family.

    Raises:
        DomainError: Unless a > 1
    """
    if not a > 1.0:
        raise DomainError(f"Sandwiched upper mixture needs a > 1, got {a}")
    x = problem.x
    return (x * sandwiched(a, problem.rho1, problem.rho_av)
            + (1.0 - x) * sandwiched(a, problem.rho2, problem.rho_av))


class H2HalfCheck(NamedTuple):
    value: float
    ok: bool
    trace_terms: tuple


def h2_half_check(rho1: DensityMatrix, rho2: DensityMatrix) -> H2HalfCheck:
    """
    At x = 1/2: 1/2 [H_2(rho1, rho_Av) + H_2(rho2, rho_Av)] <= log 2.

    Each Tr rho_k^2 rho_Av^-1 is at most 2, with equality for orthogonal
    pure states.
    """
    problem = MixtureProblem(0.5, rho1, rho2)
    inverse = matrix_power(problem.rho_av.matrix, -1.0)
    terms = tuple(float(np.real(np.trace(rho.entries @ rho.entries @ inverse.entries)))
                  for rho in (rho1, rho2))
    value = 0.5 * (renyi(2.0, rho1, problem.rho_av) + renyi(2.0, rho2, problem.rho_av))
    ok = value <= math.log(2.0) + CHAIN_TOLERANCE and all(t <= 2.0 + CHAIN_TOLERANCE for t in terms)
    return H2HalfCheck(value=value, ok=ok, trace_terms=terms)


class HalfMixtureChain(NamedTuple):
    standard: float
    sandwiched: float
    gap: float
    ok: bool


def half_mixture_chain(rho1: DensityMatrix, rho2: DensityMatrix, a: float) -> HalfMixtureChain:
    """
    At x = 1/2 and 1 < a <= 2 check
    log 2 >= mean standard H_a >= mean sandwiched H~_a >= gap.

    Raises:
        DomainError: Unless 1 < a <= 2
    """
    if not 1.0 < a <= 2.0:
        raise DomainError(f"Half-mixture chain needs a in (1, 2], got {a}")
    problem = MixtureProblem(0.5, rho1, rho2)
    standard = 0.5 * (renyi(a, rho1, problem.rho_av) + renyi(a, rho2, problem.rho_av))
    sandwich = sandwiched_upper_mixture(a, problem)
    gap = concavity_gap(problem)
    ok = (math.log(2.0) - standard >= -CHAIN_TOLERANCE
          and standard - sandwich >= -CHAIN_TOLERANCE
          and sandwich - gap >= -CHAIN_TOLERANCE)
    return HalfMixtureChain(standard=standard, sandwiched=sandwich, gap=gap, ok=ok)


@dataclass(frozen=True)
class ChainCheck:
    """
    One verified relation ``lhs <relation> rhs``.

    ``slack`` is signed: the larger side minus the smaller side for an
    inequality, -|lhs - rhs| for an identity. A check that cannot be
    evaluated is kept with ``applicable=False`` and always passes.
    """
    name: str
    relation: str
    slack: float
    ok: bool
    applicable: bool = True


def _inequality(name: str, smaller_name: str, smaller: Optional[float],
                larger_name: str, larger: Optional[float], tolerance: float) -> ChainCheck:
    relation = f"{smaller_name} <= {larger_name}"
    if smaller is None or larger is None:
        return ChainCheck(name, relation, 0.0, True, applicable=False)
    slack = larger - smaller
    return ChainCheck(name, relation, slack, slack >= -tolerance)


def _identity(name: str, left_name: str, left: float, right_name: str, right: float,
              tolerance: float) -> ChainCheck:
    slack = -abs(left - right)
    return ChainCheck(name, f"{left_name} == {right_name}", slack, slack >= -tolerance)


def compare_bounds(first: str, first_value: Optional[float],
                   second: str, second_value: Optional[float],
                   margin: float = COMPARISON_MARGIN) -> str:
    """Name of the strictly larger bound, ``tie`` within ``margin``, ``n/a`` if one is missing."""
    if first_value is None or second_value is None:
        return NOT_APPLICABLE
    if first_value - second_value > margin:
        return first
    if second_value - first_value > margin:
        return second
    return TIE


def strongest_bound(values: Dict[str, Optional[float]], margin: float = COMPARISON_MARGIN) -> str:
    """The label with the largest value, or ``tie`` if the top two lie within ``margin``."""
    present = sorted(((v, k) for k, v in values.items() if v is not None), reverse=True)
    if not present:
        return NOT_APPLICABLE
    if len(present) > 1 and present[0][0] - present[1][0] <= margin:
        return TIE
    return present[0][1]


@dataclass
class BoundReport:
    """
    Gap, every bound and the verdict of each verified relation for one problem.

    ``checks`` decide ``all_ok``; ``advisory`` holds relations that are
    reported with their slack but may fail without the report failing.
    """
    dim: int
    x: float
    gap: float
    gap_via_relent: float
    block_identity: float
    kim: Optional[float]
    kim_min: Optional[float]
    pinsker: float
    carlen_lieb: float
    block_pinsker: float
    binary_entropy: float
    rfz_bures: float
    rfz_trace: float
    rfz_purified: float
    audenaert: float
    carlen_lieb_routes: CarlenLiebRoutes
    checks: List[ChainCheck] = field(default_factory=list)
    advisory: List[ChainCheck] = field(default_factory=list)
    comparisons: Dict[str, str] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    tolerance: float = CHAIN_TOLERANCE

    @property
    def lower_bounds(self) -> Dict[str, Optional[float]]:
        return {"lowbd0": self.kim, "lowbd1": self.pinsker, "lowbd2": self.carlen_lieb}

    @property
    def upper_bounds(self) -> Dict[str, float]:
        return {"binary_entropy": self.binary_entropy, "rfz_bures": self.rfz_bures,
                "rfz_trace": self.rfz_trace, "rfz_purified": self.rfz_purified,
                "audenaert": self.audenaert}

    @property
    def chain_ok(self) -> Dict[str, bool]:
        return {check.name: check.ok for check in self.checks}

    @property
    def slack(self) -> Dict[str, float]:
        return {check.name: check.slack for check in self.checks if check.applicable}

    @property
    def all_ok(self) -> bool:
        return all(check.ok for check in self.checks)

    @property
    def violations(self) -> List[ChainCheck]:
        return [check for check in self.checks if not check.ok]

    @property
    def advisory_failures(self) -> List[ChainCheck]:
        return [check for check in self.advisory if not check.ok]

    @property
    def worst_slack(self) -> float:
        slacks = self.slack.values()
        return min(slacks) if slacks else 0.0

    @property
    def max_abs_slack(self) -> float:
        """Largest violation magnitude; 0 when every gating relation holds."""
        return max((-check.slack for check in self.violations), default=0.0)

    @property
    def winner(self) -> str:
        return self.comparisons.get("winner", NOT_APPLICABLE)

    def to_dict(self) -> Dict[str, Any]:
        def describe(checks: List[ChainCheck]) -> List[Dict[str, Any]]:
            return [{"name": c.name, "relation": c.relation, "slack": c.slack,
                     "ok": c.ok, "applicable": c.applicable} for c in checks]

        return {
            "dim": self.dim,
            "x": self.x,
            "gap": self.gap,
            "gap_via_relent": self.gap_via_relent,
            "block_identity": self.block_identity,
            "lower_bounds": {
                "lowbd0": self.kim,
                "lowbd1": self.pinsker,
                "lowbd2": self.carlen_lieb,
                "kim_min": self.kim_min,
                "block_pinsker": self.block_pinsker,
            },
            "upper_bounds": self.upper_bounds,
            "carlen_lieb_routes": self.carlen_lieb_routes._asdict(),
            "checks": describe(self.checks),
            "advisory": describe(self.advisory),
            "comparisons": dict(self.comparisons),
            "notes": list(self.notes),
            "all_ok": self.all_ok,
            "worst_slack": self.worst_slack,
            "max_abs_slack": self.max_abs_slack,
        }


def full_report(problem: MixtureProblem, tolerance: float = CHAIN_TOLERANCE) -> BoundReport:
    """
    Evaluate the gap and every bound, then verify the bound chain.

    Gating relations (all with absolute ``tolerance``): gap >= 0,
    pinsker <= gap, pinsker <= kim_min <= gap and pinsker <= kim (when Kim is
    defined), carlen_lieb <= gap, block_pinsker <= pinsker,
    gap <= audenaert <= classic, audenaert <= rfz_purified,
    gap <= rfz_purified, rfz_bures <= rfz_trace, plus the identities tying
    the gap to its relative-entropy and block forms and the Carlen-Lieb
    routes to each other.

    Advisory relations: kim <= gap and gap <= rfz_bures. Both are reported
    with their slack and a debug log line when they fail.

    Args:
        problem: Mixture problem to evaluate
        tolerance: Slack tolerance for the relations

    Returns:
        BoundReport
    """
    notes: List[str] = []

    gap = concavity_gap(problem)
    via_relent = gap_via_relent(problem)
    via_block = block_identity(problem)
    kim: Optional[float] = None
    kim_min: Optional[float] = None
    try:
        prefactor, forward, backward = _kim_prefactor_and_entropies(problem)
        kim = prefactor * max(forward, backward)
        kim_min = prefactor * min(forward, backward)
    except IndeterminateAtHalf:
        notes.append(KIM_NOT_EVALUATED)
    pinsker = pinsker_lower(problem)
    routes = carlen_lieb_routes(problem)
    carlen_lieb = routes.closed_form
    pinsker_routes = block_pinsker_routes(problem)
    classic = classic_upper(problem)
    rfz = rfz_upper(problem)
    audenaert = audenaert_upper(problem)

    checks = [
        ChainCheck("concavity", "0 <= gap", gap, gap >= -CONCAVITY_TOLERANCE),
        _inequality("pinsker_le_gap", "pinsker", pinsker, "gap", gap, tolerance),
        _inequality("kim_min_le_gap", "kim_min", kim_min, "gap", gap, tolerance),
        _inequality("pinsker_le_kim_min", "pinsker", pinsker, "kim_min", kim_min, tolerance),
        _inequality("pinsker_le_kim", "pinsker", pinsker, "kim", kim, tolerance),
        _inequality("carlen_lieb_le_gap", "carlen_lieb", carlen_lieb, "gap", gap, tolerance),
        _inequality("block_pinsker_le_pinsker", "block_pinsker", pinsker_routes.block,
                    "pinsker", pinsker, tolerance),
        _inequality("gap_le_audenaert", "gap", gap, "audenaert", audenaert, tolerance),
        _inequality("audenaert_le_classic", "audenaert", audenaert, "binary_entropy", classic, tolerance),
        _inequality("audenaert_le_rfz_purified", "audenaert", audenaert,
                    "rfz_purified", rfz.purified, tolerance),
        _inequality("gap_le_rfz_purified", "gap", gap, "rfz_purified", rfz.purified, tolerance),
        _inequality("rfz_bures_le_rfz_trace", "rfz_bures", rfz.bures, "rfz_trace", rfz.trace, tolerance),
        _identity("gap_eq_relent", "gap", gap, "gap_via_relent", via_relent, tolerance),
        _identity("gap_eq_block", "gap", gap, "block_identity", via_block, tolerance),
        ChainCheck("carlen_lieb_routes", "closed_form == block_renyi == hellinger_form",
                   -routes.spread, routes.spread <= tolerance),
        _identity("block_pinsker_routes", "block", pinsker_routes.block,
                  "closed_form", pinsker_routes.closed_form, tolerance),
    ]
    advisory = [
        _inequality("kim_le_gap", "kim", kim, "gap", gap, tolerance),
        _inequality("gap_le_rfz_bures", "gap", gap, "rfz_bures", rfz.bures, tolerance),
    ]

    comparisons = {
        "lowbd1_vs_lowbd2": compare_bounds("lowbd1", pinsker, "lowbd2", carlen_lieb),
        "lowbd0_vs_lowbd2": compare_bounds("lowbd0", kim, "lowbd2", carlen_lieb),
        "lowbd0_vs_lowbd1": compare_bounds("lowbd0", kim, "lowbd1", pinsker),
        "strongest": strongest_bound({"lowbd0": kim, "lowbd1": pinsker, "lowbd2": carlen_lieb}),
        "rfz_trace_vs_classic": ("rfz_trace" if rfz_vs_classic(problem).rfz_looser
                                 else "binary_entropy"),
    }
    comparisons["winner"] = comparisons["lowbd1_vs_lowbd2"]

    report = BoundReport(
        dim=problem.dim, x=problem.x, gap=gap, gap_via_relent=via_relent,
        block_identity=via_block, kim=kim, kim_min=kim_min, pinsker=pinsker,
        carlen_lieb=carlen_lieb, block_pinsker=pinsker_routes.block, binary_entropy=classic,
        rfz_bures=rfz.bures, rfz_trace=rfz.trace, rfz_purified=rfz.purified,
        audenaert=audenaert, carlen_lieb_routes=routes, checks=checks, advisory=advisory,
        comparisons=comparisons, notes=notes, tolerance=tolerance,
    )

    for check in report.violations:
        logger.warning("Relation %s (%s) violated with slack %.3e at x = %s",
                       check.name, check.relation, check.slack, problem.x)
    for check in report.advisory_failures:
        logger.debug("Advisory relation %s (%s) fails with slack %.3e at x = %s",
                     check.name, check.relation, check.slack, problem.x)
    logger.debug("Report for dim %d, x = %s: gap %.6g, winner %s",
                 problem.dim, problem.x, gap, report.winner)
    return report
