"""
The three published qubit examples comparing the Kim, Pinsker and
Carlen-Lieb lower bounds.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

from ..utils.math_utils import normalize_vector_3d, vector_norm_3d
from .bounds import BoundReport, full_report
from .states import BLOCH_TOLERANCE, MixtureProblem, from_bloch

logger = logging.getLogger(__name__)

Vector3 = Tuple[float, float, float]

WINNER_MARGIN = 1e-6


@dataclass(frozen=True)
class AppendixExample:
    """
    One published example. ``expected`` is (winning label, losing label).
    """
    example_id: str
    w1: Vector3
    w2: Vector3
    x: float
    expected: Tuple[str, str]


APPENDIX_EXAMPLES = (
    AppendixExample("a", (0.2876, 0.4322, 0.3112), (-0.1552, -0.0532, -0.0874), 0.7086,
                    ("lowbd1", "lowbd2")),
    AppendixExample("b", (-0.2136, 0.0702, -0.0944), (-0.5204, 0.7790, -0.1772), 0.2197,
                    ("lowbd2", "lowbd1")),
    # |w1| is about 1.00284; used after projection onto the unit sphere
    AppendixExample("c", (-0.1850, 0.7506, -0.6388), (0.0254, 0.0012, 0.0114), 0.5218,
                    ("lowbd2", "lowbd0")),
)


def _admissible(w: Vector3) -> Tuple[Vector3, bool]:
    if vector_norm_3d(w) > 1.0 + BLOCH_TOLERANCE:
        return normalize_vector_3d(w), True
    return w, False


@dataclass
class AppendixRow:
    """
    Evaluation of one example.

    ``w1``/``w2`` are the literals as published; ``projected`` is set when a
    literal lay outside the unit ball and its projection was used instead.
    """
    example_id: str
    x: float
    w1: Vector3
    w2: Vector3
    projected: bool
    report: BoundReport
    expected: Tuple[str, str]

    @property
    def gap(self) -> float:
        return self.report.gap

    @property
    def winner(self) -> str:
        return self.report.winner

    @property
    def margin(self) -> float:
        """Winning bound minus losing bound for the expected comparison."""
        values = self.report.lower_bounds
        winner, loser = self.expected
        return values[winner] - values[loser]

    @property
    def matches(self) -> bool:
        return self.margin > WINNER_MARGIN

    def describe_mismatch(self) -> str:
        winner, loser = self.expected
        values = self.report.lower_bounds
        return (f"example ({self.example_id}): expected {winner} > {loser}, got "
                f"{winner} = {values[winner]!r}, {loser} = {values[loser]!r}")

    def to_dict(self) -> Dict[str, Any]:
        winner, loser = self.expected
        return {
            "id": self.example_id,
            "x": self.x,
            "w1": list(self.w1),
            "w2": list(self.w2),
            "projected": self.projected,
            "expected": f"{winner} > {loser}",
            "margin": self.margin,
            "matches": self.matches,
            "winner": self.winner,
            "report": self.report.to_dict(),
        }


def evaluate_example(example: AppendixExample) -> AppendixRow:
    """Evaluate every bound for one example."""
    w1, projected1 = _admissible(example.w1)
    w2, projected2 = _admissible(example.w2)
    if projected1 or projected2:
        logger.info("Example (%s): Bloch vector outside the unit ball projected onto the sphere",
                    example.example_id)

    problem = MixtureProblem(example.x, from_bloch(w1), from_bloch(w2))
    return AppendixRow(
        example_id=example.example_id,
        x=example.x,
        w1=example.w1,
        w2=example.w2,
        projected=projected1 or projected2,
        report=full_report(problem),
        expected=example.expected,
    )


def evaluate_appendix() -> List[AppendixRow]:
    return [evaluate_example(example) for example in APPENDIX_EXAMPLES]
