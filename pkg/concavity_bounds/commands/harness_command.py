"""
Command-line harness: evaluate a problem, reproduce the appendix examples,
run fuzz campaigns and search critical Renyi parameters.

Exit status: 0 when every check passes, 1 on usage or input errors, 2 when
a mathematical check fails.
"""

import argparse
import csv
import io
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

from .. import __version__
from ..core.appendix import AppendixRow, evaluate_appendix
from ..core.bounds import CHAIN_TOLERANCE, BoundReport, ChainCheck, full_report
from ..core.critical_search import CriticalParams, find_critical_params
from ..core.errors import ConcavityBoundsError, DomainError, NotPositiveSemidefinite
from ..core.fuzz_campaign import CSV_COLUMNS, FuzzCampaign, FuzzConfig, format_number
from ..core.states import DensityMatrix, MixtureProblem, from_bloch, load_state_file, state_to_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CHECK_FAILED = 2

FORMATS = ("table", "json", "csv")
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


class UsageError(Exception):
    """Raised instead of argparse's own exit so usage errors map to status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: error: {message}")


def parse_triple(text: str) -> Tuple[float, float, float]:
    """Parse "w1,w2,w3" into three floats."""
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number in {text!r}")


def parse_int_list(text: str) -> Tuple[int, ...]:
    try:
        values = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def parse_ranks(text: str) -> Optional[Tuple[int, ...]]:
    """ "full" or a comma-separated list of ranks."""
    if text.strip().lower() == "full":
        return None
    return parse_int_list(text)


def configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level, format=LOG_FORMAT, force=True)


def _dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _report_row(row_id: str, report: BoundReport) -> List[str]:
    return [
        row_id, str(report.dim), format_number(report.x), format_number(report.gap),
        format_number(report.kim), format_number(report.pinsker), format_number(report.carlen_lieb),
        format_number(report.block_pinsker), format_number(report.binary_entropy),
        format_number(report.rfz_bures), format_number(report.rfz_trace),
        format_number(report.audenaert), report.winner, format_number(report.max_abs_slack),
    ]


def _check_line(check: ChainCheck, failed: str) -> str:
    if not check.applicable:
        verdict = "n/a"
    else:
        verdict = "ok" if check.ok else failed
    return f"    {check.name:<28} {check.relation:<44} slack {check.slack:+.3e}  {verdict}"


def render_report_table(report: BoundReport) -> str:
    def value(v: Optional[float]) -> str:
        return "not evaluated" if v is None else f"{v:.10f}"

    lines = [
        f"dim = {report.dim}, x = {report.x}",
        f"  gap                     {value(report.gap)}",
        f"  lowbd0 (Kim)            {value(report.kim)}",
        f"  Kim, min form           {value(report.kim_min)}",
        f"  lowbd1 (Pinsker)        {value(report.pinsker)}",
        f"  lowbd2 (Carlen-Lieb)    {value(report.carlen_lieb)}",
        f"  block Pinsker           {value(report.block_pinsker)}",
        f"  binary entropy h(x)     {value(report.binary_entropy)}",
        f"  RFZ (Bures)             {value(report.rfz_bures)}",
        f"  RFZ (trace)             {value(report.rfz_trace)}",
        f"  RFZ (purified)          {value(report.rfz_purified)}",
        f"  Audenaert               {value(report.audenaert)}",
        "  checks:",
    ]
    for check in report.checks:
        lines.append(_check_line(check, "VIOLATED"))
    if report.advisory:
        lines.append("  advisory:")
        for check in report.advisory:
            lines.append(_check_line(check, "fails"))
    lines.append("  comparisons: " + ", ".join(f"{k} = {v}" for k, v in report.comparisons.items()))
    for note in report.notes:
        lines.append(f"  note: {note}")
    lines.append(f"  all checks {'pass' if report.all_ok else 'FAIL'}")
    return "\n".join(lines)


def render_critical_table(params: CriticalParams) -> str:
    def bracket(b) -> str:
        return "-" if b is None else f"[{b.lower:.9f}, {b.upper:.9f}] (width {b.width:.2e})"

    lines = [
        f"b_c      {params.b_c if params.b_c is not None else params.b_c_status}",
        f"  status {params.b_c_status}, bracket {bracket(params.b_c_bracket)}",
        f"a_star   {params.a_star if params.a_star is not None else params.a_star_status}",
        f"  status {params.a_star_status}, bracket {bracket(params.a_star_bracket)}",
        f"reference bounds: Pinsker {params.pinsker:.10f}, Audenaert {params.audenaert:.10f}",
        f"b grid (monotone: {params.b_grid_monotone}):",
    ]
    lines += [f"  b = {p.parameter:.6f}  mixture {p.value:.10f}  Pinsker {p.reference:.10f}"
              for p in params.b_grid]
    lines.append(f"a grid (monotone: {params.a_grid_monotone}):")
    lines += [f"  a = {p.parameter:.6f}  mixture {p.value:.10f}  Audenaert {p.reference:.10f}"
              for p in params.a_grid]
    lines += [f"note: {note}" for note in params.notes]
    return "\n".join(lines)


class HarnessCommand:
    """
    The ``concavity-bounds`` command with subcommands eval, appendix, fuzz and critical.
    """

    command_name = "concavity-bounds"

    def __init__(self, stdout: Optional[TextIO] = None):
        self.stdout = stdout or sys.stdout

    @classmethod
    def build_parser(cls) -> argparse.ArgumentParser:
        """Define the command syntax."""
        parser = _Parser(prog=cls.command_name,
                         description="Numerical checks of bounds on the concavity of the von Neumann entropy.")
        parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
        parser.add_argument("-v", "--verbose", action="count", default=0,
                            help="More logging on stderr (repeatable)")
        parser.add_argument("-q", "--quiet", action="store_true", help="Only log errors")

        common = _Parser(add_help=False)
        common.add_argument("--format", choices=FORMATS, default="table", help="Output format")
        common.add_argument("--out", help="Write the payload to this path instead of stdout")
        common.add_argument("--tolerance", type=float, default=CHAIN_TOLERANCE,
                            help=f"Slack tolerance (default {CHAIN_TOLERANCE:g})")

        states = _Parser(add_help=False)
        first = states.add_mutually_exclusive_group(required=True)
        first.add_argument("--bloch1", type=parse_triple, help="Bloch vector w1,w2,w3 of the first state")
        first.add_argument("--state1", help="JSON state file of the first state")
        second = states.add_mutually_exclusive_group(required=True)
        second.add_argument("--bloch2", type=parse_triple, help="Bloch vector of the second state")
        second.add_argument("--state2", help="JSON state file of the second state")
        states.add_argument("--x", type=float, required=True, help="Weight of the first state, 0 < x < 1")

        subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
        subparsers.add_parser("eval", parents=[common, states], help="Evaluate every bound for one problem")
        subparsers.add_parser("appendix", parents=[common], help="Reproduce the three published examples")

        fuzz = subparsers.add_parser("fuzz", parents=[common], help="Run a seeded fuzz campaign")
        fuzz.add_argument("--dims", type=parse_int_list, default=(2,), help="Comma-separated dimensions")
        fuzz.add_argument("--ranks", type=parse_ranks, default=None, help='"full" or comma-separated ranks')
        fuzz.add_argument("--trials", type=int, default=1000, help="Trials per dimension")
        fuzz.add_argument("--seed", type=int, default=0, help="64-bit master seed")
        fuzz.add_argument("--workers", type=int, default=1, help="Worker processes")

        critical = subparsers.add_parser("critical", parents=[common, states],
                                         help="Search the critical Renyi parameters")
        critical.add_argument("--width", type=float, default=1e-6, help="Bisection bracket width")
        return parser

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """
        Execute the command.

        Returns:
            Exit status
        """
        try:
            args = self.build_parser().parse_args(argv)
        except UsageError as e:
            print(str(e), file=sys.stderr)
            return EXIT_INPUT_ERROR

        configure_logging(args.verbose, args.quiet)
        handler = getattr(self, f"_cmd_{args.command}")
        try:
            return handler(args)
        except NotPositiveSemidefinite as e:
            # inputs were validated already, so this came out of a computation
            logger.error("Check failed: %s", e)
            return EXIT_CHECK_FAILED
        except (DomainError, ValueError) as e:
            logger.error("%s", e)
            return EXIT_INPUT_ERROR
        except ConcavityBoundsError as e:
            logger.error("Check failed: %s", e)
            return EXIT_CHECK_FAILED
        except OSError as e:
            logger.error("Could not write output: %s", e)
            return EXIT_INPUT_ERROR

    def _emit(self, args: argparse.Namespace, text: str) -> None:
        if not text.endswith("\n"):
            text += "\n"
        if args.out:
            with open(args.out, "w", newline="") as f:
                f.write(text)
            logger.info("Wrote %s", args.out)
        else:
            self.stdout.write(text)

    @staticmethod
    def _load(bloch: Optional[Tuple[float, float, float]], path: Optional[str]) -> DensityMatrix:
        return from_bloch(bloch) if bloch is not None else load_state_file(path)

    def _problem(self, args: argparse.Namespace) -> MixtureProblem:
        rho1 = self._load(args.bloch1, args.state1)
        rho2 = self._load(args.bloch2, args.state2)
        return MixtureProblem(args.x, rho1, rho2)

    def _cmd_eval(self, args: argparse.Namespace) -> int:
        problem = self._problem(args)
        report = full_report(problem, args.tolerance)

        if args.format == "json":
            payload = report.to_dict()
            payload["states"] = [state_to_json(problem.rho1), state_to_json(problem.rho2)]
            text = _dumps(payload)
        elif args.format == "csv":
            text = _csv_text(CSV_COLUMNS, [_report_row("eval", report)])
        else:
            text = render_report_table(report)
        self._emit(args, text)
        return EXIT_OK if report.all_ok else EXIT_CHECK_FAILED

    def _cmd_appendix(self, args: argparse.Namespace) -> int:
        rows = evaluate_appendix()
        failures = [row for row in rows if not row.matches or not row.report.all_ok]

        if args.format == "json":
            text = _dumps({"examples": [row.to_dict() for row in rows], "passed": not failures})
        elif args.format == "csv":
            text = _csv_text(CSV_COLUMNS, [_report_row(row.example_id, row.report) for row in rows])
        else:
            text = "\n\n".join(self._appendix_block(row) for row in rows)
        self._emit(args, text)

        for row in failures:
            print(row.describe_mismatch(), file=sys.stderr)
        return EXIT_CHECK_FAILED if failures else EXIT_OK

    @staticmethod
    def _appendix_block(row: AppendixRow) -> str:
        winner, loser = row.expected
        header = (f"example ({row.example_id}): w1 = {row.w1}, w2 = {row.w2}, x = {row.x}"
                  + (" [w1 projected onto the unit sphere]" if row.projected else ""))
        verdict = (f"expected {winner} > {loser}: margin {row.margin:+.6e} "
                   f"{'ok' if row.matches else 'MISMATCH'}")
        return "\n".join([header, render_report_table(row.report), verdict])

    def _cmd_fuzz(self, args: argparse.Namespace) -> int:
        config = FuzzConfig(dims=args.dims, ranks=args.ranks, trials=args.trials, seed=args.seed,
                            tolerance=args.tolerance, workers=args.workers)
        report = FuzzCampaign(config).run()

        if args.format == "json":
            text = report.to_json()
        elif args.format == "csv":
            buffer = io.StringIO()
            report.write_csv(buffer)
            text = buffer.getvalue()
        else:
            text = self._fuzz_table(report.summary())
        self._emit(args, text)
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED

    @staticmethod
    def _fuzz_table(summary: Dict[str, Any]) -> str:
        lines = [f"fuzz: {summary['total_trials']} trials, seed {summary['seed']}, "
                 f"ranks {summary['ranks']}, tolerance {summary['tolerance']:g}"]
        for dim, tally in summary["tallies"].items():
            lines.append(f"  dim {dim}: {tally['passed']}/{tally['trials']} passed, "
                         f"Kim n/a {tally['kim_not_applicable']}, winners {tally['winners']}, "
                         f"strongest {tally['strongest']}, advisory failures {tally['advisory_failures']}")
        lines.append(f"  violations: {len(summary['violations'])}")
        for violation in summary["violations"]:
            lines.append(f"    trial {violation['trial_id']}: {violation['inequality']} "
                         f"slack {violation['slack']:+.3e}")
        return "\n".join(lines)

    def _cmd_critical(self, args: argparse.Namespace) -> int:
        params = find_critical_params(self._problem(args), args.width)

        if args.format == "json":
            text = _dumps(params.to_dict())
        elif args.format == "csv":
            rows = ([["b", format_number(p.parameter), format_number(p.value), format_number(p.reference)]
                     for p in params.b_grid]
                    + [["a", format_number(p.parameter), format_number(p.value), format_number(p.reference)]
                       for p in params.a_grid])
            text = _csv_text(("family", "parameter", "mixture", "reference"), rows)
        else:
            text = render_critical_table(params)
        self._emit(args, text)
        return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    return HarnessCommand().run(argv)
