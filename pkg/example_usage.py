"""
Example usage of the concavity bounds toolkit.

This script demonstrates how to use the toolkit programmatically, without
the command line, for scripted checks and batch runs.
"""

import logging
import math

from concavity_bounds import FuzzCampaign, FuzzConfig, MixtureProblem, from_bloch, full_report
from concavity_bounds.core.appendix import evaluate_appendix
from concavity_bounds.core.critical_search import CriticalParameterSearch, SearchSettings


def example_single_problem():
    """
    Evaluate every bound for two orthogonal pure qubit states mixed equally.
    """
    problem = MixtureProblem(0.5, from_bloch((0.0, 0.0, 1.0)), from_bloch((0.0, 0.0, -1.0)))
    report = full_report(problem)

    print(f"gap        = {report.gap:.6f} (log 2 = {math.log(2.0):.6f})")
    print(f"Pinsker    = {report.pinsker:.6f}")
    print(f"Audenaert  = {report.audenaert:.6f}")
    for note in report.notes:
        print(f"note: {note}")
    print(f"all checks pass: {report.all_ok}")


def example_appendix():
    """
    Reproduce which lower bound wins in the three published qubit examples.
    """
    for row in evaluate_appendix():
        winner, loser = row.expected
        print(f"({row.example_id}) {winner} > {loser} by {row.margin:.3e}: {row.matches}")


def example_critical_search():
    """
    Search the critical Renyi parameters with a progress callback.
    """
    problem = MixtureProblem(0.7086, from_bloch((0.2876, 0.4322, 0.3112)),
                             from_bloch((-0.1552, -0.0532, -0.0874)))
    search = CriticalParameterSearch(problem, SearchSettings(bracket_width=1e-6))

    def progress(name: str, step: int, width: float) -> None:
        if step % 10 == 0:
            print(f"  {name}: step {step}, bracket width {width:.2e}")

    search.set_progress_callback(progress)
    params = search.search()
    print(f"b_c = {params.b_c} ({params.b_c_status})")
    print(f"a_star = {params.a_star} ({params.a_star_status})")


def example_fuzz_campaign():
    """
    Run a small seeded campaign over qubits and qutrits.
    """
    report = FuzzCampaign(FuzzConfig(dims=(2, 3), trials=50, seed=2024)).run()
    for dim, tally in sorted(report.tallies.items()):
        print(f"dim {dim}: {tally.passed}/{tally.trials} passed, winners {dict(tally.winners)}")
    print(f"violations: {len(report.violations)}")


if __name__ == "__main__":
    logging.basicConfig(level=logging.WARNING)
    example_single_problem()
    example_appendix()
    example_critical_search()
    example_fuzz_campaign()
