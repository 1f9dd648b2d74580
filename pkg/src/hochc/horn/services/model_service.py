"""Canonical models over finite frames.

Every type denotes an explicit finite set: the carrier for Int, ``{0, 1}`` for
Bool, and the full function space for arrows. Functions are ``Table`` values
listing their results in the canonical order of the argument domain, so that
expansions are hashable and the iteration of the immediate consequence
operator can detect cycles.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import TypeAlias

from ..clauses import Clause, DefiniteClause, GoalClause, Program, clause_atoms, program_of
from ..syntax import (
    BOOL,
    And,
    App,
    Arrow,
    Base,
    Bool,
    Exists,
    HochcError,
    Lam,
    Neg,
    Or,
    Signature,
    Sym,
    Term,
    Type,
    Var,
    ordered_free_vars,
    spine,
    uncurry,
)
from .structure_service import FiniteStructure, UnboundValuationError

logger = logging.getLogger(__name__)


class FrameBudgetExceededError(HochcError):
    """Raised when a function space is too large to enumerate."""


@dataclass(frozen=True)
class Table:
    """A function given by its values on the argument domain, in canonical order."""

    arg_type: Type
    values: tuple[Element, ...]
    index: Mapping[Element, int] = field(compare=False, hash=False, repr=False)

    def __call__(self, arg: Element) -> Element:
        return self.values[self.index[arg]]


Element: TypeAlias = str | int | Table
Valuation: TypeAlias = Mapping[str, Element]


class FiniteFrame:
    """The full (standard) frame over a finite structure, with memoised domains."""

    def __init__(self, structure: FiniteStructure, cell_budget: int = 1_000_000) -> None:
        self.structure = structure
        self.cell_budget = cell_budget
        self._domains: dict[Type, tuple[Element, ...]] = {}
        self._indexes: dict[Type, dict[Element, int]] = {}
        self._background: dict[str, Element] = {}

    def domain(self, ty: Type) -> tuple[Element, ...]:
        """The elements of ``ty`` in canonical order."""
        if ty not in self._domains:
            self._domains[ty] = self._enumerate(ty)
            self._indexes[ty] = {e: i for i, e in enumerate(self._domains[ty])}
        return self._domains[ty]

    def index(self, ty: Type) -> dict[Element, int]:
        self.domain(ty)
        return self._indexes[ty]

    def _enumerate(self, ty: Type) -> tuple[Element, ...]:
        match ty:
            case Base():
                return tuple(self.structure.carrier)
            case Bool():
                return (0, 1)
            case Arrow(arg=arg, result=result):
                args = self.domain(arg)
                results = self.domain(result)
                count = len(results) ** len(args)
                if count * max(len(args), 1) > self.cell_budget:
                    logger.error(f"Function space {ty} needs {count * len(args)} cells")
                    raise FrameBudgetExceededError(
                        f"function space {ty} has {count} elements of {len(args)} entries,"
                        f" over the budget of {self.cell_budget}"
                    )
                index = self.index(arg)
                return tuple(Table(arg, values, index) for values in itertools.product(results, repeat=len(args)))
        raise TypeError(f"not a type: {ty!r}")

    def table(self, arg_type: Type, fn: Callable[[Element], Element]) -> Table:
        return Table(arg_type, tuple(fn(a) for a in self.domain(arg_type)), self.index(arg_type))

    def bottom(self, ty: Type) -> Element:
        if isinstance(ty, Bool):
            return 0
        if isinstance(ty, Arrow):
            return self.table(ty.arg, lambda _: self.bottom(ty.result))
        raise TypeError(f"{ty} is not relational")

    def join(self, ty: Type, a: Element, b: Element) -> Element:
        if isinstance(ty, Bool):
            return max(a, b)  # type: ignore[type-var]
        if isinstance(ty, Arrow) and isinstance(a, Table) and isinstance(b, Table):
            values = tuple(self.join(ty.result, x, y) for x, y in zip(a.values, b.values, strict=True))
            return Table(a.arg_type, values, a.index)
        raise TypeError(f"{ty} is not relational")

    def leq(self, ty: Type, a: Element, b: Element) -> bool:
        if isinstance(ty, Bool):
            return a <= b  # type: ignore[operator]
        if isinstance(ty, Arrow) and isinstance(a, Table) and isinstance(b, Table):
            return all(self.leq(ty.result, x, y) for x, y in zip(a.values, b.values, strict=True))
        raise TypeError(f"{ty} is not relational")

    def background_value(self, name: str, ty: Type) -> Element:
        """The denotation of a background symbol as a curried table."""
        if name not in self._background:
            self._background[name] = self._curry(name, ty, [])
        return self._background[name]

    def _curry(self, name: str, ty: Type, collected: list[Element]) -> Element:
        if isinstance(ty, Arrow):
            return self.table(ty.arg, lambda a: self._curry(name, ty.result, [*collected, a]))
        if isinstance(ty, Bool):
            return int(self.structure.holds(name, collected))  # type: ignore[arg-type]
        if not collected:
            return self.structure.constant(name)
        return self.structure.apply_function(name, collected)  # type: ignore[arg-type]


@dataclass(frozen=True)
class Expansion:
    """Interpretations of the foreground symbols over a fixed structure."""

    foreground: tuple[tuple[str, Element], ...]

    def __getitem__(self, name: str) -> Element:
        for rel, value in self.foreground:
            if rel == name:
                return value
        raise KeyError(name)

    def as_dict(self) -> dict[str, Element]:
        return dict(self.foreground)


def bottom_expansion(frame: FiniteFrame, sig: Signature) -> Expansion:
    return Expansion(tuple((rel, frame.bottom(ty)) for rel, ty in sig.foreground.items()))


def join_expansions(frame: FiniteFrame, sig: Signature, a: Expansion, b: Expansion) -> Expansion:
    return Expansion(tuple((rel, frame.join(sig.foreground[rel], a[rel], b[rel])) for rel, _ in a.foreground))


def leq_expansions(frame: FiniteFrame, sig: Signature, a: Expansion, b: Expansion) -> bool:
    return all(frame.leq(sig.foreground[rel], a[rel], b[rel]) for rel, _ in a.foreground)


def eval_term(frame: FiniteFrame, sig: Signature, exp: Expansion, m: Term, valuation: Valuation) -> Element:
    """
    Standard denotation of ``m`` in the expansion.

    Args:
        frame: The finite frame
        sig: Signature giving the types of symbols
        exp: Interpretation of the foreground symbols
        m: A well-typed term
        valuation: Values for the free variables of ``m``

    Returns:
        The element denoted by ``m``

    Raises:
        UnboundValuationError: If a free variable is missing from ``valuation``
    """
    match m:
        case Var(name=name):
            if name not in valuation:
                raise UnboundValuationError(name)
            return valuation[name]
        case Sym(name=name):
            if sig.is_foreground(name):
                return exp[name]
            ty = sig.type_of(name)
            if ty is None:
                raise UnboundValuationError(name)
            return frame.background_value(name, ty)
        case Lam(param=param, param_type=ty, body=body):
            return frame.table(ty, lambda a: eval_term(frame, sig, exp, body, {**valuation, param: a}))
        case Neg():
            return frame.table(BOOL, lambda a: 1 - a)  # type: ignore[operator]
        case And():
            return frame.table(BOOL, lambda a: frame.table(BOOL, lambda b: min(a, b)))  # type: ignore[type-var]
        case Or():
            return frame.table(BOOL, lambda a: frame.table(BOOL, lambda b: max(a, b)))  # type: ignore[type-var]
        case Exists(arg_type=ty):
            predicates = Arrow(ty, BOOL)
            return frame.table(predicates, lambda p: max(p(a) for a in frame.domain(ty)))  # type: ignore[operator]
    head, args = spine(m)
    if isinstance(head, Neg) and len(args) == 1:
        return 1 - eval_term(frame, sig, exp, args[0], valuation)  # type: ignore[operator]
    if isinstance(head, And) and len(args) == 2:
        left = eval_term(frame, sig, exp, args[0], valuation)
        return 0 if left == 0 else eval_term(frame, sig, exp, args[1], valuation)
    if isinstance(head, Or) and len(args) == 2:
        left = eval_term(frame, sig, exp, args[0], valuation)
        return 1 if left == 1 else eval_term(frame, sig, exp, args[1], valuation)
    if isinstance(head, Exists) and len(args) == 1 and isinstance(args[0], Lam):
        body = args[0]
        for a in frame.domain(head.arg_type):
            if eval_term(frame, sig, exp, body.body, {**valuation, body.param: a}) == 1:
                return 1
        return 0
    if isinstance(head, Sym) and sig.is_background(head.name):
        values = [eval_term(frame, sig, exp, a, valuation) for a in args]
        ty = sig.type_of(head.name)
        _, result = uncurry(ty)  # type: ignore[arg-type]
        if len(values) == len(uncurry(ty)[0]):  # type: ignore[arg-type]
            if isinstance(result, Bool):
                return int(frame.structure.holds(head.name, values))  # type: ignore[arg-type]
            return frame.structure.apply_function(head.name, values)  # type: ignore[arg-type]
    assert isinstance(m, App)  # noqa: S101
    fn = eval_term(frame, sig, exp, m.fn, valuation)
    if not isinstance(fn, Table):
        raise TypeError(f"applying a non-function: {m}")
    return fn(eval_term(frame, sig, exp, m.arg, valuation))


def immediate_consequence(frame: FiniteFrame, sig: Signature, prog: Program, exp: Expansion) -> Expansion:
    """``T(B)`` interprets each ``R`` as the denotation of ``lambda xs_R. F_R`` in ``B``."""
    return Expansion(tuple((rel, eval_term(frame, sig, exp, prog.abstraction(rel), {})) for rel, _ in exp.foreground))


def canonical_structure(frame: FiniteFrame, sig: Signature, prog: Program) -> Expansion:
    """
    The canonical model: the join of the transfinite iteration from bottom.

    Successor stages apply the immediate consequence operator. When a stage
    repeats one seen since the last limit, the next limit stage is the join of
    all stages so far; the iteration stops when a limit stage recurs.

    Args:
        frame: The finite frame
        sig: Signature with the foreground symbols
        prog: Program with positive existential bodies

    Returns:
        An expansion ``s`` with ``T(s) <= s``
    """
    stage = bottom_expansion(frame, sig)
    running = stage
    seen = {stage}
    limits: set[Expansion] = set()
    iterations = 0
    while True:
        stage = immediate_consequence(frame, sig, prog, stage)
        running = join_expansions(frame, sig, running, stage)
        iterations += 1
        logger.debug(f"Canonical model stage {iterations}")
        if stage not in seen:
            seen.add(stage)
            continue
        if running in limits:
            logger.debug(f"Canonical model stable after {iterations} stages")
            return running
        limits.add(running)
        stage = running
        seen = {stage}


@dataclass(frozen=True)
class ModelSat:
    pass


@dataclass(frozen=True)
class ModelUnsat:
    """A clause falsified by the expansion under ``valuation``."""

    clause_index: int
    clause: Clause
    valuation: dict[str, Element]


ModelCheckResult: TypeAlias = ModelSat | ModelUnsat


def clause_holds(frame: FiniteFrame, sig: Signature, exp: Expansion, clause: Clause, valuation: Valuation) -> bool:
    body = clause.atoms if isinstance(clause, GoalClause) else clause.body
    if any(eval_term(frame, sig, exp, a, valuation) == 0 for a in body):
        return True
    return isinstance(clause, DefiniteClause) and eval_term(frame, sig, exp, clause.head, valuation) == 1


def model_check(frame: FiniteFrame, sig: Signature, exp: Expansion, clauses: Sequence[Clause]) -> ModelCheckResult:
    """
    Check every clause under every valuation over the frame.

    Valuations are enumerated lexicographically; the first falsifying one
    (in clause order) is returned.
    """
    for index, clause in enumerate(clauses, start=1):
        variables = ordered_free_vars(clause_atoms(clause))
        domains = [frame.domain(v.type) for v in variables]
        for values in itertools.product(*domains):
            valuation = {v.name: e for v, e in zip(variables, values, strict=True)}
            if not clause_holds(frame, sig, exp, clause, valuation):
                logger.debug(f"Clause {index} falsified under {valuation}")
                return ModelUnsat(index, clause, valuation)
    return ModelSat()


@dataclass(frozen=True)
class StructureOutcome:
    """Canonical model and model-check result over one structure."""

    structure: FiniteStructure
    frame: FiniteFrame
    expansion: Expansion
    result: ModelCheckResult

    @property
    def is_sat(self) -> bool:
        return isinstance(self.result, ModelSat)


def decide_structure(
    sig: Signature, clauses: Sequence[Clause], structure: FiniteStructure, cell_budget: int = 1_000_000
) -> StructureOutcome:
    """Build the canonical model of the definite clauses over ``structure`` and check all clauses."""
    frame = FiniteFrame(structure, cell_budget)
    prog = program_of(sig, [c for c in clauses if isinstance(c, DefiniteClause)])
    expansion = canonical_structure(frame, sig, prog)
    return StructureOutcome(structure, frame, expansion, model_check(frame, sig, expansion, clauses))


def decide_finite(
    sig: Signature,
    clauses: Sequence[Clause],
    structures: Sequence[FiniteStructure],
    cell_budget: int = 1_000_000,
    stop_at_first_sat: bool = True,
) -> list[StructureOutcome]:
    """
    Decide satisfiability over a finite family, structure by structure.

    The clause set is satisfiable iff some outcome is sat.
    """
    outcomes: list[StructureOutcome] = []
    for structure in structures:
        outcome = decide_structure(sig, clauses, structure, cell_budget)
        outcomes.append(outcome)
        logger.debug(f"{structure}: {'sat' if outcome.is_sat else 'unsat'}")
        if outcome.is_sat and stop_at_first_sat:
            break
    logger.info(f"Decided over {len(outcomes)} of {len(structures)} structures")
    return outcomes


def show_element(e: Element) -> str:
    if isinstance(e, Table):
        domain = e.index
        return "{" + ", ".join(f"{show_element(a)}:{show_element(e.values[i])}" for a, i in domain.items()) + "}"
    return str(e)


def dump_expansion(frame: FiniteFrame, sig: Signature, exp: Expansion) -> list[str]:
    """Rows ``R(a1, ..., an) = 0|1`` in canonical domain order, per foreground symbol."""
    lines: list[str] = []
    for rel, value in exp.foreground:
        arg_types, _ = uncurry(sig.foreground[rel])
        for args in itertools.product(*(frame.domain(t) for t in arg_types)):
            result = value
            for a in args:
                result = result(a)  # type: ignore[operator]
            lines.append(f"{rel}({', '.join(show_element(a) for a in args)}) = {result}")
    return lines

