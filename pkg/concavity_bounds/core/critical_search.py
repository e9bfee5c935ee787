"""
Critical Renyi parameters of a mixture problem, found by monotone bisection.

b_c is the smallest b in [1/2, 1) for which the standard Renyi mixture
already dominates the Pinsker bound; a_star is the largest a > 1 for which
the sandwiched Renyi mixture stays below the Audenaert bound.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .bounds import (CHAIN_TOLERANCE, audenaert_upper, pinsker_lower, renyi_lower_mixture,
                     sandwiched_upper_mixture)
from .errors import ConvergenceError, DegenerateProblem, DomainError
from .states import MixtureProblem

logger = logging.getLogger(__name__)

DEGENERATE_DISTANCE = 1e-10

FOUND = "found"
LEFT_ENDPOINT = "holds at the left endpoint"
NONE_IN_RANGE = "none in range"
HOLDS_FOR_ALL = "holds for all tested a"
NONE = "none"

Predicate = Callable[[float], bool]


@dataclass(frozen=True)
class SearchSettings:
    """
    Bisection and pre-scan settings.

    Attributes:
        bracket_width: Final bracket width for both parameters
        b_upper: Right end of the b interval (1 itself is excluded)
        a_lower: Smallest a tested
        a_max: Largest a tested
        tolerance: Slack tolerance of the compared inequalities
        grid_points: Number of pre-scan points per parameter
        max_iterations: Bisection step budget
    """
    bracket_width: float = 1e-6
    b_upper: float = 1.0 - 1e-6
    a_lower: float = 1.0 + 1e-4
    a_max: float = 64.0
    tolerance: float = CHAIN_TOLERANCE
    grid_points: int = 17
    max_iterations: int = 200

    def __post_init__(self) -> None:
        if not self.bracket_width > 0.0:
            raise DomainError(f"bracket_width must be positive, got {self.bracket_width}")
        if not 0.5 < self.b_upper < 1.0:
            raise DomainError(f"b_upper must lie in (1/2, 1), got {self.b_upper}")
        if not 1.0 < self.a_lower < self.a_max:
            raise DomainError(f"Need 1 < a_lower < a_max, got {self.a_lower}, {self.a_max}")
        if self.grid_points < 2:
            raise DomainError(f"grid_points must be at least 2, got {self.grid_points}")
        if self.max_iterations < 1:
            raise DomainError(f"max_iterations must be positive, got {self.max_iterations}")


class Bracket(NamedTuple):
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


class GridPoint(NamedTuple):
    parameter: float
    value: float
    reference: float


def bisect_monotone(predicate: Predicate, lower: float, upper: float, width: float,
                    max_iterations: int = 200,
                    callback: Optional[Callable[[int, float], None]] = None) -> Bracket:
    """
    Shrink [lower, upper] around the point where a monotone predicate flips.

    The predicate values at the two ends must differ; each step keeps that
    property, so the returned bracket always straddles the switch.

    Args:
        predicate: Monotone boolean function of the parameter
        lower: Left end
        upper: Right end
        width: Target bracket width
        max_iterations: Step budget
        callback: Called with (step, current width) after each step

    Returns:
        Bracket of width <= ``width``

    Raises:
        DomainError: If the predicate agrees at both ends
        ConvergenceError: If the budget runs out first
    """
    at_lower = predicate(lower)
    if at_lower == predicate(upper):
        raise DomainError(f"Predicate does not switch on [{lower}, {upper}]")

    for step in range(1, max_iterations + 1):
        if upper - lower <= width:
            return Bracket(lower, upper)
        middle = 0.5 * (lower + upper)
        if middle in (lower, upper):
            break
        if predicate(middle) == at_lower:
            lower = middle
        else:
            upper = middle
        logger.debug("Bisection step %d: [%.12g, %.12g]", step, lower, upper)
        if callback:
            callback(step, upper - lower)

    if upper - lower <= width:
        return Bracket(lower, upper)
    raise ConvergenceError(f"Bisection stopped at width {upper - lower:.3e} > {width:g}")


def _is_monotone(values: List[float], tolerance: float) -> bool:
    return bool(np.all(np.diff(np.asarray(values)) >= -tolerance))


@dataclass
class CriticalParams:
    """
    Outcome of a critical-parameter search.

    ``b_c`` and ``a_star`` are None when the status is a marker rather than
    a number; brackets are None when no bisection ran.
    """
    b_c: Optional[float]
    b_c_status: str
    b_c_bracket: Optional[Bracket]
    a_star: Optional[float]
    a_star_status: str
    a_star_bracket: Optional[Bracket]
    pinsker: float
    audenaert: float
    b_grid: List[GridPoint] = field(default_factory=list)
    a_grid: List[GridPoint] = field(default_factory=list)
    b_grid_monotone: bool = True
    a_grid_monotone: bool = True
    settings: SearchSettings = field(default_factory=SearchSettings)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        def bracket(b: Optional[Bracket]) -> Optional[List[float]]:
            return None if b is None else [b.lower, b.upper]

        return {
            "b_c": self.b_c if self.b_c is not None else self.b_c_status,
            "b_c_status": self.b_c_status,
            "b_c_bracket": bracket(self.b_c_bracket),
            "a_star": self.a_star if self.a_star is not None else self.a_star_status,
            "a_star_status": self.a_star_status,
            "a_star_bracket": bracket(self.a_star_bracket),
            "a_validity_interval": (None if self.a_star_status == NONE
                                    else [self.settings.a_lower,
                                          self.a_star if self.a_star is not None else self.settings.a_max]),
            "pinsker": self.pinsker,
            "audenaert": self.audenaert,
            "b_grid": [p._asdict() for p in self.b_grid],
            "a_grid": [p._asdict() for p in self.a_grid],
            "b_grid_monotone": self.b_grid_monotone,
            "a_grid_monotone": self.a_grid_monotone,
            "bracket_width": self.settings.bracket_width,
            "a_max": self.settings.a_max,
            "tolerance": self.settings.tolerance,
            "notes": list(self.notes),
        }


class CriticalParameterSearch:
    """
    Finds b_c and a_star for one mixture problem.
    """

    def __init__(self, problem: MixtureProblem, settings: Optional[SearchSettings] = None):
        """
        Initialize the search.

        Args:
            problem: Mixture problem with distinct states
            settings: Search settings (defaults if omitted)
        """
        self.problem = problem
        self.settings = settings or SearchSettings()

        self.progress_callback: Optional[Callable[[str, int, float], None]] = None
        self.evaluation_count = 0

    def set_progress_callback(self, callback: Callable[[str, int, float], None]) -> None:
        """
        Set a callback to track bisection progress.

        Args:
            callback: Function taking the parameter name ("b" or "a"), the step
                number and the current bracket width
        """
        self.progress_callback = callback

    def validate_setup(self) -> Tuple[bool, List[str]]:
        """
        Check that the search is meaningful for this problem.

        Returns:
            Tuple of (is_valid, list_of_issues)
        """
        issues = []
        distance = self.problem.distance
        if distance < DEGENERATE_DISTANCE:
            issues.append(f"States are indistinguishable (trace distance {distance:.3e})")
        return len(issues) == 0, issues

    def _renyi_holds(self, pinsker: float) -> Predicate:
        def holds(b: float) -> bool:
            self.evaluation_count += 1
            return renyi_lower_mixture(b, self.problem) >= pinsker - self.settings.tolerance
        return holds

    def _sandwiched_holds(self, audenaert: float) -> Predicate:
        def holds(a: float) -> bool:
            self.evaluation_count += 1
            return sandwiched_upper_mixture(a, self.problem) <= audenaert + self.settings.tolerance
        return holds

    def _callback_for(self, name: str) -> Optional[Callable[[int, float], None]]:
        if self.progress_callback is None:
            return None
        return lambda step, width: self.progress_callback(name, step, width)

    def _scan(self) -> Tuple[List[GridPoint], List[GridPoint], float, float]:
        s = self.settings
        pinsker = pinsker_lower(self.problem)
        audenaert = audenaert_upper(self.problem)
        b_values = np.linspace(0.5, s.b_upper, s.grid_points)
        a_values = np.geomspace(s.a_lower, s.a_max, s.grid_points)
        b_grid = [GridPoint(float(b), renyi_lower_mixture(float(b), self.problem), pinsker)
                  for b in b_values]
        a_grid = [GridPoint(float(a), sandwiched_upper_mixture(float(a), self.problem), audenaert)
                  for a in a_values]
        return b_grid, a_grid, pinsker, audenaert

    def _search_b(self, pinsker: float) -> Tuple[Optional[float], str, Optional[Bracket]]:
        s = self.settings
        holds = self._renyi_holds(pinsker)
        if holds(0.5):
            return 0.5, LEFT_ENDPOINT, None
        if not holds(s.b_upper):
            return None, NONE_IN_RANGE, None
        bracket = bisect_monotone(holds, 0.5, s.b_upper, s.bracket_width,
                                  s.max_iterations, self._callback_for("b"))
        return bracket.upper, FOUND, bracket

    def _search_a(self, audenaert: float) -> Tuple[Optional[float], str, Optional[Bracket]]:
        s = self.settings
        holds = self._sandwiched_holds(audenaert)
        if not holds(s.a_lower):
            return None, NONE, None
        if holds(s.a_max):
            return None, HOLDS_FOR_ALL, None
        bracket = bisect_monotone(holds, s.a_lower, s.a_max, s.bracket_width,
                                  s.max_iterations, self._callback_for("a"))
        return bracket.lower, FOUND, bracket

    def search(self) -> CriticalParams:
        """
        Run the pre-scan and both bisections.

        Returns:
            CriticalParams

        Raises:
            DegenerateProblem: If the two states are indistinguishable
        """
        is_valid, issues = self.validate_setup()
        if not is_valid:
            raise DegenerateProblem("; ".join(issues))

        self.evaluation_count = 0
        b_grid, a_grid, pinsker, audenaert = self._scan()
        b_c, b_status, b_bracket = self._search_b(pinsker)
        a_star, a_status, a_bracket = self._search_a(audenaert)

        tolerance = self.settings.tolerance
        params = CriticalParams(
            b_c=b_c, b_c_status=b_status, b_c_bracket=b_bracket,
            a_star=a_star, a_star_status=a_status, a_star_bracket=a_bracket,
            pinsker=pinsker, audenaert=audenaert,
            b_grid=b_grid, a_grid=a_grid,
            b_grid_monotone=_is_monotone([p.value for p in b_grid], tolerance),
            a_grid_monotone=_is_monotone([p.value for p in a_grid], tolerance),
            settings=self.settings,
        )
        if a_status != NONE:
            params.notes.append(
                "sandwiched mixtures are nondecreasing in a, so the Audenaert bound holds on "
                "an interval starting at a = 1+, not on a tail a >= a_c")
        if not (params.b_grid_monotone and params.a_grid_monotone):
            logger.warning("Pre-scan grid is not monotone; brackets may not be unique")

        logger.info("Critical search: b_c %s (%s), a_star %s (%s) after %d evaluations",
                    b_c, b_status, a_star, a_status, self.evaluation_count)
        return params


def find_critical_params(problem: MixtureProblem, tolerance: float = 1e-6) -> CriticalParams:
    """
    Locate b_c and a_star with brackets of width at most ``tolerance``.

    Raises:
        DegenerateProblem: If trace_distance(rho1, rho2) < 1e-10
    """
    return CriticalParameterSearch(problem, SearchSettings(bracket_width=tolerance)).search()

