"""Command-line interface: subcommands over problem files.

Verdicts, traces and emitted files go to stdout; log messages go to stderr.
Exit status is 0 for sat, 1 for unsat, 2 for unknown and 3 for usage or
input errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn, TextIO

from .. import __version__
from ..config import settings
from .clauses import Clause, clause_atoms
from .schemas import Diagnostic, ProblemFile, TheoryKind, validate_all
from .services import (
    Budget,
    BudgetExhausted,
    ClauseSet,
    DecisionSat,
    Finite,
    ModelSat,
    Refuted,
    Saturated,
    decide_bsr_sla,
    decide_datalog,
    decide_structures,
    dump_expansion,
    flatten,
    format_registry,
    lift,
    parse,
    print_problem,
    replay,
    require_hobhc_sla,
    saturate,
    theory_handle,
    translate,
)
from .services.fragment_service import Decision
from .services.model_service import StructureOutcome, decide_structure, show_element
from .services.structure_service import TheoryHandle
from .syntax import HochcError, contains_lambda, order, ordered_free_vars

logger = logging.getLogger(__name__)

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_UNKNOWN = 2
EXIT_ERROR = 3


class InputError(HochcError):
    """Raised when a problem file is well formed but unsuitable for the subcommand."""

    def __init__(self, message: str, diagnostics: Sequence[Diagnostic] = ()) -> None:
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="hochc", description="Higher-order constrained Horn clause toolbox")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More log output on stderr (repeatable)")

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument(
        "--max-steps", type=int, default=None, help=f"Rule applications (default {settings.MAX_STEPS})"
    )
    budget.add_argument(
        "--max-clauses", type=int, default=None, help=f"Stored clauses (default {settings.MAX_CLAUSES})"
    )
    budget.add_argument(
        "--max-term-size", type=int, default=None, help=f"Largest derived atom (default {settings.MAX_TERM_SIZE})"
    )
    budget.add_argument(
        "--frame-budget",
        type=int,
        default=None,
        help=f"Largest function space of a finite frame (default {settings.FRAME_CELL_BUDGET})",
    )
    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument("file", help="Problem file, or - for stdin")
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("-o", "--output", type=Path, default=None, help="Write to FILE instead of stdout")

    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    check = commands.add_parser("check", parents=[problem, budget], help="Saturate with the resolution calculus")
    check.add_argument("--trace", action="store_true", help="Print the refutation trace after unsat")
    commands.add_parser("decide", parents=[problem, budget], help="Run the decision procedure of the fragment")
    translate_cmd = commands.add_parser(
        "translate", parents=[problem, output], help="Emit the first-order translation"
    )
    translate_cmd.add_argument(
        "--format", choices=format_registry.get_format_ids(), default="native", help="Output format"
    )
    translate_cmd.add_argument("--lift", action="store_true", help="Lift lambda abstractions first")
    commands.add_parser("lift", parents=[problem, output], help="Replace lambda abstractions by defined relations")
    commands.add_parser("typecheck", parents=[problem], help="Validate the clauses and print relation types")
    commands.add_parser(
        "model", parents=[problem, budget], help="Canonical model over each structure of a finite theory"
    )
    return parser


def _budget(args: argparse.Namespace) -> Budget:
    overrides = {
        "max_steps": args.max_steps,
        "max_clauses": args.max_clauses,
        "max_term_size": args.max_term_size,
        "frame_budget": args.frame_budget,
    }
    return dataclasses.replace(Budget(), **{k: v for k, v in overrides.items() if v is not None})


def load_problem(path: str) -> ProblemFile:
    """
    Read, parse and validate a problem file.

    Raises:
        ParseError: On malformed input
        InputError: If some clause is not a well-typed HoCHC
    """
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    problem = parse(text)
    diagnostics = validate_all(problem.signature, list(problem.clauses))
    if diagnostics:
        raise InputError(f"{len(diagnostics)} problem(s) in {path}", diagnostics)
    return problem


def _write(args: argparse.Namespace, text: str, out: TextIO) -> None:
    if args.output is not None:
        args.output.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {args.output}")
    else:
        out.write(text)


def cmd_check(args: argparse.Namespace, problem: ProblemFile, out: TextIO) -> int:
    budget = _budget(args)
    if problem.theory.kind is TheoryKind.LIA and problem.theory.constants:
        flat = flatten(problem.signature, require_hobhc_sla(problem.signature, list(problem.clauses)))
        theory: TheoryHandle = Finite(tuple(flat.structures()))
        clause_set = ClauseSet(flat.signature, flat.clauses)
    else:
        theory = theory_handle(problem.theory)
        clause_set = ClauseSet(problem.signature, problem.clauses)
    verdict = saturate(theory, clause_set, budget)
    match verdict:
        case Refuted(trace=trace):
            replay(theory, clause_set, trace)
            print("unsat", file=out)
            if args.trace:
                print(trace, file=out)
            return EXIT_UNSAT
        case Saturated():
            print("sat", file=out)
            return EXIT_SAT
        case BudgetExhausted(stats=stats):
            logger.warning(f"Budget exhausted: {stats}")
            print("unknown", file=out)
            return EXIT_UNKNOWN
    raise AssertionError(verdict)


def _describe(outcome: StructureOutcome) -> list[str]:
    lines = [f"structure {outcome.structure.name}: {'sat' if outcome.is_sat else 'unsat'}"]
    if outcome.structure.witness:
        lines.append("witness " + " ".join(f"{k}={v}" for k, v in sorted(outcome.structure.witness.items())))
    return lines


def _falsified(outcome: StructureOutcome) -> list[str]:
    result = outcome.result
    if isinstance(result, ModelSat):
        return []
    valuation = ",".join(f"{k}:={show_element(v)}" for k, v in result.valuation.items())
    return [f"falsified clause {result.clause_index}: {result.clause} under {{{valuation}}}"]


def _decide(problem: ProblemFile, budget: Budget) -> Decision:
    clauses: list[Clause] = list(problem.clauses)
    match problem.theory.kind:
        case TheoryKind.LIA:
            return decide_bsr_sla(problem.signature, clauses, budget.frame_budget)
        case TheoryKind.EQDL:
            return decide_datalog(problem.signature, clauses, budget.frame_budget)
        case TheoryKind.FINITE:
            return decide_structures(problem.signature, clauses, problem.theory.structures, budget.frame_budget)


def cmd_decide(args: argparse.Namespace, problem: ProblemFile, out: TextIO) -> int:
    decision = _decide(problem, _budget(args))
    if isinstance(decision, DecisionSat):
        outcome = decision.outcome
        print("sat", file=out)
        for line in [*_describe(outcome), *dump_expansion(outcome.frame, decision.signature, outcome.expansion)]:
            print(line, file=out)
        return EXIT_SAT
    print("unsat", file=out)
    for outcome in decision.outcomes:
        for line in [*_describe(outcome), *_falsified(outcome)]:
            print(line, file=out)
    return EXIT_UNSAT


def cmd_model(args: argparse.Namespace, problem: ProblemFile, out: TextIO) -> int:
    if problem.theory.kind is TheoryKind.LIA:
        raise InputError("model needs a finite background theory (theory finite or theory eqdl)")
    theory = theory_handle(problem.theory)
    assert isinstance(theory, Finite)  # noqa: S101
    budget = _budget(args)
    any_sat = False
    for structure in theory.structures:
        outcome = decide_structure(problem.signature, list(problem.clauses), structure, budget.frame_budget)
        any_sat = any_sat or outcome.is_sat
        lines = [*_describe(outcome), *dump_expansion(outcome.frame, problem.signature, outcome.expansion)]
        for line in [*lines, *_falsified(outcome)]:
            print(line, file=out)
    return EXIT_SAT if any_sat else EXIT_UNSAT


def cmd_translate(args: argparse.Namespace, problem: ProblemFile, out: TextIO) -> int:
    sig, clauses = problem.signature, problem.clauses
    if args.lift:
        lifted = lift(sig, clauses)
        sig, clauses = lifted.signature, lifted.clauses
    handler = format_registry.get_handler(args.format)
    assert handler is not None  # noqa: S101
    _write(args, handler.emit(translate(sig, clauses)), out)
    return EXIT_SAT


def cmd_lift(args: argparse.Namespace, problem: ProblemFile, out: TextIO) -> int:
    lifted = lift(problem.signature, problem.clauses)
    variables = dict(problem.variables)
    for clause in lifted.clauses:
        for v in ordered_free_vars(clause_atoms(clause)):
            variables.setdefault(v.name, v.type)
    result = dataclasses.replace(problem, signature=lifted.signature, variables=variables, clauses=lifted.clauses)
    _write(args, print_problem(result), out)
    return EXIT_SAT


def cmd_typecheck(args: argparse.Namespace, problem: ProblemFile, out: TextIO) -> int:
    for name, ty in problem.signature.foreground.items():
        print(f"{name} : {ty} (order {order(ty)})", file=out)
    with_lambdas = sum(1 for c in problem.clauses if any(contains_lambda(a) for a in clause_atoms(c)))
    print(f"ok: {len(problem.rules)} rules, {len(problem.goals)} goals, {with_lambdas} with lambdas", file=out)
    return EXIT_SAT


COMMANDS = {
    "check": cmd_check,
    "decide": cmd_decide,
    "translate": cmd_translate,
    "lift": cmd_lift,
    "typecheck": cmd_typecheck,
    "model": cmd_model,
}


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Command-line arguments without the program name
        out: Stream for verdicts and emitted files (stdout by default)
        err: Stream for error messages (stderr by default)

    Returns:
        The exit status
    """
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_ERROR
    settings.configure_logging(args.verbose)
    try:
        problem = load_problem(args.file)
        return COMMANDS[args.command](args, problem, out)
    except InputError as e:
        print(f"error: {e}", file=err)
        for diagnostic in e.diagnostics:
            print(f"  {diagnostic}", file=err)
        return EXIT_ERROR
    except HochcError as e:
        print(f"error: {e}", file=err)
        return EXIT_ERROR
    except OSError as e:
        print(f"error: {e}", file=err)
        return EXIT_ERROR
