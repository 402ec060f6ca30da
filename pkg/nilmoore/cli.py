# Version: v1.2
"""
nilmoore.cli — Command-line front end.

Subcommands: validate | mult | spectrum | counterexample | moore-check.
Exit codes: 0 success, 1 mathematically invalid input, 2 unparsable input,
3 valid input outside what the library computes.
"""

import argparse
import logging
import sys
from typing import Callable, Optional, Sequence

from nilmoore import __version__, config, metrics
from nilmoore.config import logger, validate_config
from nilmoore.errors import MooreError
from nilmoore.lattice_subgroup import integral_dual
from nilmoore.multiplicity import evaluate, in_dual_lattice, multiplicity_two_step, skew_form
from nilmoore.nilpotent import DualElement
from nilmoore.orbits import (
    enumerate_spectrum,
    filiform_counterexample,
    fixture_orbit_classes,
    orbit_lattice_point,
)
from nilmoore.problem import Problem, build_problem, load_problem
from nilmoore.report import (
    OrbitRow,
    Report,
    algebra_summary,
    counterexample_summary,
    orbit_row,
    outside_spectrum_row,
    render_table,
    spectrum_row,
    to_structured,
)


def _load(args: argparse.Namespace) -> Problem:
    return build_problem(load_problem(args.file), seed=args.seed)


def _base_report(command: str, problem: Problem) -> Report:
    gamma = problem.gamma
    return Report(
        command=command,
        algebra=algebra_summary(problem.algebra),
        closure_word_length=gamma.word_length,
        closure_samples=gamma.samples,
    )


def _selected(problem: Problem, name: Optional[str]) -> list[tuple[str, DualElement]]:
    if name is None:
        return list(problem.functionals.items())
    return [problem.functional(name)]


def orbit_row_for(problem: Problem, name: str, l: DualElement) -> OrbitRow:
    """Dispatch one functional by step and integrality."""
    g, gamma = problem.algebra, problem.gamma
    if g.step <= 2:
        if in_dual_lattice(gamma, l):
            return orbit_row(name, multiplicity_two_step(gamma, l))
        witness = orbit_lattice_point(gamma, l)
        if witness is None:
            return outside_spectrum_row(name, l)
        logger.info(f"{name} is not integral; using the orbit point {g.describe(witness, dual=True)}")
        return orbit_row(name, multiplicity_two_step(gamma, witness), l=l)

    if skew_form(g, l).is_full_stabilizer and not in_dual_lattice(gamma, l):
        return outside_spectrum_row(name, l)
    classes = problem.orbit_classes.get(name)
    if classes is None and in_dual_lattice(gamma, l):
        classes = fixture_orbit_classes(gamma, l)
        if classes is not None:
            logger.info(f"{name}: using the built-in filiform orbit classes")
    return orbit_row(name, evaluate(gamma, l, classes))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> Report:
    problem = _load(args)
    report = _base_report("validate", problem)
    g, gamma = problem.algebra, problem.gamma
    report.diagnostics.append(
        f"ok: nilpotent Lie algebra of dimension {g.n} and step {g.step}"
    )
    report.diagnostics.append(
        f"ok: exp(log Γ) closed on all generator pairs and {gamma.samples} random words "
        f"of length ≤ {gamma.word_length}"
    )
    dual = integral_dual(gamma)
    report.diagnostics.append(
        "integral dual basis: "
        + ", ".join(g.describe(v, dual=True) for v in dual.vectors())
    )
    for name, l in problem.functionals.items():
        status = "integral" if in_dual_lattice(gamma, l) else "not integral"
        report.diagnostics.append(f"functional {name}: {status} on log Γ")
    return report


def cmd_mult(args: argparse.Namespace) -> Report:
    problem = _load(args)
    report = _base_report("mult", problem)
    for name, l in _selected(problem, args.functional):
        report.orbits.append(orbit_row_for(problem, name, l))
    return report


def cmd_moore_check(args: argparse.Namespace) -> Report:
    problem = _load(args)
    report = _base_report("moore-check", problem)
    for name, l in _selected(problem, args.functional):
        row = orbit_row_for(problem, name, l)
        report.orbits.append(
            row.model_copy(update={"malcev_basis": None, "a_matrix": None, "stabilizer": []})
        )
    return report


def cmd_spectrum(args: argparse.Namespace) -> Report:
    problem = _load(args)
    report = _base_report("spectrum", problem)
    bound = config.DEFAULT_SPECTRUM_BOUND if args.bound is None else args.bound
    for entry in enumerate_spectrum(problem.gamma, bound):
        report.spectrum.append(spectrum_row(entry))
    report.diagnostics.append(f"dual-lattice coordinates in [-{bound}, {bound}]")
    return report


def cmd_counterexample(args: argparse.Namespace) -> Report:
    checks = config.DEFAULT_ACTION_SPOT_CHECKS if args.verify_action else 0
    result = filiform_counterexample(spot_checks=checks, seed=args.seed)
    return Report(
        command="counterexample",
        algebra=algebra_summary(result.gamma.algebra),
        closure_word_length=result.gamma.word_length,
        closure_samples=result.gamma.samples,
        counterexample=counterexample_summary(result),
    )


COMMANDS: dict[str, Callable[[argparse.Namespace], Report]] = {
    "validate": cmd_validate,
    "mult": cmd_mult,
    "spectrum": cmd_spectrum,
    "counterexample": cmd_counterexample,
    "moore-check": cmd_moore_check,
}


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=("table", "structured"),
        default="table",
        help="Output format (structured = versioned JSON with exact rationals)",
    )
    common.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"Seed for the randomized lattice-closure check (default {config.DEFAULT_SEED})",
    )
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG"
    )

    parser = argparse.ArgumentParser(
        prog="moore",
        description="Exact multiplicities and Moore-formula checks for compact nilmanifolds",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="Check algebra and lattice subgroup")
    p.add_argument("file", help='Problem file, or "-" for stdin')

    for name, help_text in (
        ("mult", "Multiplicity report per functional"),
        ("moore-check", "Moore-formula verdict per functional"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("file", help='Problem file, or "-" for stdin')
        p.add_argument("--functional", default=None, help="Functional name (default: all)")

    p = sub.add_parser("spectrum", parents=[common], help="Enumerate orbits meeting 𝔤*_Γ")
    p.add_argument("file", help='Problem file, or "-" for stdin')
    p.add_argument(
        "--bound",
        type=int,
        default=None,
        help=f"Coordinate bound B (default {config.DEFAULT_SPECTRUM_BOUND})",
    )

    p = sub.add_parser(
        "counterexample", parents=[common], help="Four-dimensional filiform counterexample"
    )
    p.add_argument(
        "--verify-action",
        action="store_true",
        help=f"Run {config.DEFAULT_ACTION_SPOT_CHECKS} random coadjoint-action spot checks",
    )
    return parser


def _set_verbosity(level: int) -> None:
    if level >= 2:
        logger.setLevel(logging.DEBUG)
    elif level == 1:
        logger.setLevel(logging.INFO)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _set_verbosity(args.verbose)
    for warning in validate_config():
        logger.warning(f"[CONFIG] {warning}")

    exit_code = 0
    with metrics.timer() as t:
        try:
            report = COMMANDS[args.command](args)
        except MooreError as e:
            print(f"error: {e}", file=sys.stderr)
            exit_code = e.exit_code
            report = None
    metrics.record_computation(
        kind=f"cmd_{args.command.replace('-', '_')}",
        elapsed_ms=t.elapsed_ms,
        exit_code=exit_code,
    )
    if report is not None:
        print(to_structured(report) if args.format == "structured" else render_table(report))
    return exit_code
