"""Shared fixtures for the test modules."""

from __future__ import annotations

import itertools
from collections.abc import Iterator
from pathlib import Path

from ..schemas import ProblemFile
from ..services import ClauseSet, Expansion, FiniteFrame, parse
from ..syntax import BOOL, INT, Signature, Sym, Term, Var, apply, arrow, lia_background, numeral

PROBLEMS_DIR = Path(__file__).resolve().parent.parent / "problems"

ITER_TYPE = arrow(INT, INT, INT, BOOL)


def problem_path(name: str) -> Path:
    return PROBLEMS_DIR / name


def load(name: str) -> ProblemFile:
    """Parse one of the bundled problem files."""
    return parse(problem_path(name).read_text(encoding="utf-8"))


def clause_set(problem: ProblemFile) -> ClauseSet:
    return ClauseSet(problem.signature, problem.clauses)


def lia_signature(foreground: dict | None = None, constants: tuple[str, ...] = ()) -> Signature:
    return Signature(lia_background(constants), foreground or {}, numerals=True)


def iv(name: str) -> Var:
    """An Int variable."""
    return Var(name, INT)


def op(name: str, *args: Term | int) -> Term:
    """``(name a1 ... an)`` with ints read as numerals."""
    return apply(Sym(name), [numeral(a) if isinstance(a, int) else a for a in args])


def all_expansions(frame: FiniteFrame, sig: Signature) -> Iterator[Expansion]:
    """Every interpretation of the foreground symbols over ``frame``."""
    names = list(sig.foreground)
    for values in itertools.product(*(frame.domain(sig.foreground[n]) for n in names)):
        yield Expansion(tuple(zip(names, values, strict=True)))
