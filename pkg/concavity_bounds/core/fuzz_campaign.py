"""
Seeded fuzz campaigns over random mixture problems.

Trial ``i`` (numbered across all dimensions) draws everything it needs from
``derive_seed(master_seed, i)``, so a campaign is reproducible and its
output does not depend on how trials are scheduled across workers.
"""

import csv
import json
import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, IO, Iterable, List, Optional, Sequence, Tuple

from .bounds import (CHAIN_TOLERANCE, BoundReport, ChainCheck, full_report, h2_half_check,
                     half_mixture_chain)
from .entropies import binary_entropy, max_relative, sandwiched
from .errors import DomainError
from .states import (SEED_LIMIT, MixtureProblem, SamplerConfig, derive_seed, make_generator,
                     random_density, state_to_json)

logger = logging.getLogger(__name__)

SANDWICHED_ORDERS = (1.1, 1.5, 2.0, 4.0, 8.0, 32.0)
HALF_MIXTURE_ORDERS = (1.5, 2.0)

CSV_COLUMNS = ("id", "dim", "x", "gap", "lowbd0", "lowbd1", "lowbd2", "block_pinsker",
               "upbd", "rfz_bures", "rfz_trace", "audenaert", "winner", "max_abs_slack")

# Stream labels for the per-trial sub-seeds.
_FIRST_STATE = 1
_SECOND_STATE = 2


@dataclass(frozen=True)
class FuzzConfig:
    """
    Campaign settings.

    Attributes:
        dims: Hilbert space dimensions, each >= 2
        ranks: Ranks cycled through per trial; None means full rank
        trials: Trials per dimension
        seed: 64-bit master seed
        tolerance: Slack tolerance for every checked relation
        delta: x is drawn uniformly from (delta, 1 - delta)
        workers: Worker processes; 1 runs in-process
        extra_checks: Also run the sandwiched-order, max-relative and x = 1/2 checks
        sandwiched_orders: Orders a used by the sandwiched checks
    """
    dims: Tuple[int, ...] = (2,)
    ranks: Optional[Tuple[int, ...]] = None
    trials: int = 1000
    seed: int = 0
    tolerance: float = CHAIN_TOLERANCE
    delta: float = 1e-3
    workers: int = 1
    extra_checks: bool = True
    sandwiched_orders: Tuple[float, ...] = SANDWICHED_ORDERS

    def __post_init__(self) -> None:
        if not self.dims:
            raise DomainError("At least one dimension is required")
        if any(d < 2 for d in self.dims):
            raise DomainError(f"Dimensions must be >= 2, got {list(self.dims)}")
        if self.ranks is not None and (not self.ranks or any(r < 1 for r in self.ranks)):
            raise DomainError(f"Ranks must be positive integers, got {self.ranks}")
        if self.trials < 0:
            raise DomainError(f"trials must be >= 0, got {self.trials}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.tolerance >= 0.0:
            raise DomainError(f"tolerance must be >= 0, got {self.tolerance}")
        if not 0.0 < self.delta < 0.5:
            raise DomainError(f"delta must lie in (0, 1/2), got {self.delta}")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")
        if any(a <= 1.0 for a in self.sandwiched_orders):
            raise DomainError(f"Sandwiched orders must exceed 1, got {self.sandwiched_orders}")

    def rank_for(self, dim: int, index: int) -> Optional[int]:
        """Rank of trial ``index`` in dimension ``dim``, capped at ``dim``."""
        if self.ranks is None:
            return None
        return min(self.ranks[index % len(self.ranks)], dim)


@dataclass(frozen=True)
class ViolationRecord:
    """A relation that failed by more than the tolerance on one trial."""
    inequality: str
    trial_id: int
    seed: int
    x: float
    states: Tuple[Dict[str, Any], Dict[str, Any]]
    values: Dict[str, Optional[float]]
    slack: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "inequality": self.inequality,
            "trial_id": self.trial_id,
            "seed": self.seed,
            "x": self.x,
            "states": list(self.states),
            "values": dict(self.values),
            "slack": self.slack,
        }


@dataclass
class TrialResult:
    trial_id: int
    dim: int
    rank: Optional[int]
    seed: int
    x: float
    report: BoundReport
    extra_checks: List[ChainCheck]
    states: Tuple[Dict[str, Any], Dict[str, Any]]

    @property
    def checks(self) -> List[ChainCheck]:
        return self.report.checks + self.extra_checks

    @property
    def all_ok(self) -> bool:
        return all(check.ok for check in self.checks)

    @property
    def max_abs_slack(self) -> float:
        return max((-c.slack for c in self.checks if not c.ok), default=0.0)

    def violations(self) -> List[ViolationRecord]:
        values = dict(self.report.lower_bounds)
        values.update(self.report.upper_bounds)
        values["gap"] = self.report.gap
        values["block_pinsker"] = self.report.block_pinsker
        return [
            ViolationRecord(check.name, self.trial_id, self.seed, self.x, self.states, values, check.slack)
            for check in self.checks if not check.ok
        ]

    def csv_row(self) -> List[str]:
        r = self.report
        return [
            str(self.trial_id), str(self.dim), format_number(self.x), format_number(r.gap),
            format_number(r.kim), format_number(r.pinsker), format_number(r.carlen_lieb),
            format_number(r.block_pinsker), format_number(r.binary_entropy),
            format_number(r.rfz_bures), format_number(r.rfz_trace), format_number(r.audenaert),
            r.winner, format_number(self.max_abs_slack),
        ]


def format_number(value: Optional[float]) -> str:
    """17 significant digits; empty for a missing value."""
    if value is None:
        return ""
    return format(value, ".17g")


def _sandwiched_checks(problem: MixtureProblem, orders: Sequence[float], gap: float,
                       tolerance: float) -> List[ChainCheck]:
    x = problem.x
    h = binary_entropy(x)
    checks = []
    caps = (-math.log(x), -math.log(1.0 - x))

    for k, rho in enumerate((problem.rho1, problem.rho2), start=1):
        slack = caps[k - 1] - max_relative(rho, problem.rho_av)
        checks.append(ChainCheck(f"max_relative_cap_{k}", f"H_max(rho{k}, rho_Av) <= cap", slack,
                                 slack >= -tolerance))

    for a in orders:
        first = sandwiched(a, problem.rho1, problem.rho_av)
        second = sandwiched(a, problem.rho2, problem.rho_av)
        mixture = x * first + (1.0 - x) * second
        upper = h - mixture
        lower = mixture - gap
        cap = caps[0] - first
        checks.extend([
            ChainCheck(f"sandwiched_le_binary_a={a:g}", "sandwiched mixture <= binary_entropy",
                       upper, upper >= -tolerance),
            ChainCheck(f"gap_le_sandwiched_a={a:g}", "gap <= sandwiched mixture", lower, lower >= -tolerance),
            ChainCheck(f"sandwiched_cap_a={a:g}", "H~_a(rho1, rho_Av) <= -log x", cap, cap >= -tolerance),
        ])
    return checks


def run_trial(config: FuzzConfig, trial_id: int, dim: int, index: int) -> TrialResult:
    """
    Generate and evaluate one trial.

    Args:
        config: Campaign settings
        trial_id: Campaign-wide trial number (drives the seed)
        dim: Dimension of the states
        index: Trial number within the dimension (drives the rank cycle)
    """
    seed = derive_seed(config.seed, trial_id)
    rank = config.rank_for(dim, index)
    x = float(make_generator(seed).uniform(config.delta, 1.0 - config.delta))
    rho1 = random_density(SamplerConfig(dim, rank, derive_seed(seed, _FIRST_STATE)))
    rho2 = random_density(SamplerConfig(dim, rank, derive_seed(seed, _SECOND_STATE)))
    problem = MixtureProblem(x, rho1, rho2)

    report = full_report(problem, config.tolerance)
    extra: List[ChainCheck] = []
    if config.extra_checks:
        extra = _sandwiched_checks(problem, config.sandwiched_orders, report.gap, config.tolerance)
        if dim == 2:
            half = h2_half_check(rho1, rho2)
            extra.append(ChainCheck("h2_half", "1/2 [H_2(rho1, rho_Av) + H_2(rho2, rho_Av)] <= log 2",
                                    math.log(2.0) - half.value, half.ok))
        for a in HALF_MIXTURE_ORDERS:
            chain = half_mixture_chain(rho1, rho2, a)
            extra.append(ChainCheck(f"half_mixture_chain_a={a:g}",
                                    "gap <= sandwiched <= standard <= log 2 at x = 1/2",
                                    min(math.log(2.0) - chain.standard, chain.standard - chain.sandwiched,
                                        chain.sandwiched - chain.gap),
                                    chain.ok))

    return TrialResult(trial_id, dim, rank, seed, x, report, extra,
                       (state_to_json(rho1), state_to_json(rho2)))


def _run_task(task: Tuple[FuzzConfig, int, int, int]) -> TrialResult:
    return run_trial(*task)


@dataclass
class DimensionTally:
    trials: int = 0
    passed: int = 0
    failed: int = 0
    kim_not_applicable: int = 0
    advisory_failures: Counter = field(default_factory=Counter)
    winners: Counter = field(default_factory=Counter)
    strongest: Counter = field(default_factory=Counter)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trials": self.trials,
            "passed": self.passed,
            "failed": self.failed,
            "kim_not_applicable": self.kim_not_applicable,
            "advisory_failures": dict(sorted(self.advisory_failures.items())),
            "winners": dict(sorted(self.winners.items())),
            "strongest": dict(sorted(self.strongest.items())),
        }


@dataclass
class CampaignReport:
    """Aggregated outcome of a campaign, ordered by trial id."""
    config: FuzzConfig
    tallies: Dict[int, DimensionTally] = field(default_factory=dict)
    violations: List[ViolationRecord] = field(default_factory=list)
    results: List[TrialResult] = field(default_factory=list)

    @property
    def total_trials(self) -> int:
        return sum(t.trials for t in self.tallies.values())

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, result: TrialResult) -> None:
        tally = self.tallies.setdefault(result.dim, DimensionTally())
        tally.trials += 1
        if result.all_ok:
            tally.passed += 1
        else:
            tally.failed += 1
        if result.report.kim is None:
            tally.kim_not_applicable += 1
        for check in result.report.advisory_failures:
            tally.advisory_failures[check.name] += 1
        tally.winners[result.report.winner] += 1
        tally.strongest[result.report.comparisons["strongest"]] += 1

        for violation in result.violations():
            logger.warning("Trial %d (dim %d): %s violated with slack %.3e",
                           violation.trial_id, result.dim, violation.inequality, violation.slack)
            self.violations.append(violation)
        self.results.append(result)

    def summary(self) -> Dict[str, Any]:
        return {
            "dims": list(self.config.dims),
            "ranks": "full" if self.config.ranks is None else list(self.config.ranks),
            "trials_per_dim": self.config.trials,
            "seed": self.config.seed,
            "tolerance": self.config.tolerance,
            "total_trials": self.total_trials,
            "tallies": {str(dim): tally.to_dict() for dim, tally in sorted(self.tallies.items())},
            "violations": [v.to_dict() for v in self.violations],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(_finite_or_none(self.summary()), indent=2, sort_keys=True)

    def write_csv(self, stream: IO[str]) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for result in self.results:
            writer.writerow(result.csv_row())


def _finite_or_none(payload: Any) -> Any:
    """Replace non-finite floats, which JSON cannot carry, by None."""
    if isinstance(payload, dict):
        return {k: _finite_or_none(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [_finite_or_none(v) for v in payload]
    if isinstance(payload, float) and not math.isfinite(payload):
        return None
    return payload


class FuzzCampaign:
    """
    Coordinates a fuzz campaign: trial generation, evaluation and aggregation.
    """

    def __init__(self, config: FuzzConfig):
        """
        Initialize the campaign.

        Args:
            config: Campaign settings
        """
        self.config = config
        self.progress_callback: Optional[Callable[[int, int], None]] = None

    def set_progress_callback(self, callback: Callable[[int, int], None]) -> None:
        """
        Args:
            callback: Function taking the number of finished trials and the total
        """
        self.progress_callback = callback

    def tasks(self) -> List[Tuple[FuzzConfig, int, int, int]]:
        """(config, trial_id, dim, index) for every trial, in trial-id order."""
        tasks = []
        trial_id = 0
        for dim in self.config.dims:
            for index in range(self.config.trials):
                tasks.append((self.config, trial_id, dim, index))
                trial_id += 1
        return tasks

    def _results(self, tasks: List[Tuple[FuzzConfig, int, int, int]]) -> Iterable[TrialResult]:
        if self.config.workers == 1 or len(tasks) < 2:
            return map(_run_task, tasks)
        chunksize = max(1, len(tasks) // (4 * self.config.workers))
        executor = ProcessPoolExecutor(max_workers=self.config.workers)
        # map preserves submission order, so aggregation stays in trial-id order
        return _drain(executor, executor.map(_run_task, tasks, chunksize=chunksize))

    def run(self) -> CampaignReport:
        """
        Run every trial and aggregate the results.

        Returns:
            CampaignReport
        """
        tasks = self.tasks()
        report = CampaignReport(self.config)
        for dim in self.config.dims:
            report.tallies.setdefault(dim, DimensionTally())

        logger.info("Fuzz campaign: %d trials over dims %s with %d worker(s)",
                    len(tasks), list(self.config.dims), self.config.workers)
        for done, result in enumerate(self._results(tasks), start=1):
            report.add(result)
            if self.progress_callback:
                self.progress_callback(done, len(tasks))

        logger.info("Fuzz campaign finished: %d violation(s)", len(report.violations))
        return report


def _drain(executor: ProcessPoolExecutor, results: Iterable[TrialResult]) -> Iterable[TrialResult]:
    with executor:
        yield from results
