"""Background theories: the LIA standard model and explicit finite structures."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import TypeAlias

from ..clauses import GoalClause
from ..syntax import (
    INT,
    LIA_FUNCTIONS,
    LIA_RELATIONS,
    HochcError,
    Lam,
    Sym,
    Term,
    Var,
    contains_logical,
    is_numeral,
    ordered_free_vars,
    show,
    spine,
    subterms,
)
from .lia_service import LinearizationError, Sat, linear_atom, lia_conjunction_sat

logger = logging.getLogger(__name__)

Element: TypeAlias = str
Valuation: TypeAlias = Mapping[str, Element]


class UnboundValuationError(HochcError):
    """Raised when a valuation does not cover a free variable of the evaluated atom."""

    def __init__(self, name: str) -> None:
        super().__init__(f"valuation does not bind {name}")
        self.name = name


class PreconditionViolatedError(HochcError):
    """Raised when a background-only operation receives a foreground atom."""


class StructureError(HochcError):
    """Raised when a finite structure is malformed (partial table, value outside the carrier)."""


@dataclass(frozen=True)
class FiniteStructure:
    """
    A finite first-order structure over the single sort Int.

    ``functions`` maps each function symbol (constants have arity 0) to its
    graph; ``relations`` maps each relation symbol to its characteristic table.
    ``=`` and ``!=`` are identity and difference on the carrier unless a table
    is given for them. ``witness`` optionally records an integer assignment to
    the constants that realises the structure.
    """

    carrier: tuple[Element, ...]
    functions: Mapping[str, Mapping[tuple[Element, ...], Element]] = field(default_factory=dict)
    relations: Mapping[str, Mapping[tuple[Element, ...], bool]] = field(default_factory=dict)
    name: str = ""
    witness: Mapping[str, int] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.carrier:
            raise StructureError("carrier must be nonempty")
        if len(set(self.carrier)) != len(self.carrier):
            raise StructureError("carrier elements must be distinct")
        elements = set(self.carrier)
        for name, graph in self.functions.items():
            arity = _arity(graph)
            for row, value in graph.items():
                if len(row) != arity or not set(row) <= elements or value not in elements:
                    raise StructureError(f"table of {name} has a row outside the carrier: {row} -> {value}")
            if len(graph) != len(self.carrier) ** arity:
                raise StructureError(f"table of {name} is not total over the carrier")
        for name, table in self.relations.items():
            arity = _arity(table)
            for row in table:
                if len(row) != arity or not set(row) <= elements:
                    raise StructureError(f"table of {name} has a row outside the carrier: {row}")
            if len(table) != len(self.carrier) ** arity:
                raise StructureError(f"table of {name} is not total over the carrier")

    def symbols(self) -> set[str]:
        return {*self.functions, *self.relations, "=", "!="}

    def constant(self, name: str) -> Element:
        return self.functions[name][()]

    def apply_function(self, name: str, args: Sequence[Element]) -> Element:
        return self.functions[name][tuple(args)]

    def holds(self, name: str, args: Sequence[Element]) -> bool:
        table = self.relations.get(name)
        if table is not None:
            return table[tuple(args)]
        if name == "=":
            return args[0] == args[1]
        if name == "!=":
            return args[0] != args[1]
        raise KeyError(name)

    def __str__(self) -> str:
        label = self.name or "structure"
        return f"{label} over {{{', '.join(self.carrier)}}}"


def _arity(table: Mapping[tuple[Element, ...], object]) -> int:
    return len(next(iter(table))) if table else 0


@dataclass(frozen=True)
class LiaStandard:
    """The standard model of linear integer arithmetic.

    It interprets no uninterpreted constants; a problem that declares some
    denotes a family of expansions and is handled through its flattening.
    """

    def __str__(self) -> str:
        return "lia"


@dataclass(frozen=True)
class Finite:
    """A nonempty finite (hence compact) family of finite structures."""

    structures: tuple[FiniteStructure, ...]

    def __post_init__(self) -> None:
        if not self.structures:
            raise StructureError("a finite family needs at least one structure")

    def __str__(self) -> str:
        return f"finite family of {len(self.structures)} structure(s)"


TheoryHandle: TypeAlias = LiaStandard | Finite


def eval_ground(struct: FiniteStructure, m: Term, valuation: Valuation) -> Element:
    """Evaluate a background term of type Int."""
    match m:
        case Var(name=name):
            if name not in valuation:
                raise UnboundValuationError(name)
            return valuation[name]
        case Sym(name=name):
            return struct.constant(name)
    head, args = spine(m)
    if not isinstance(head, Sym):
        raise PreconditionViolatedError(f"not a background term: {show(m)}")
    return struct.apply_function(head.name, [eval_ground(struct, a, valuation) for a in args])


def eval_background(struct: FiniteStructure, atom: Term, valuation: Valuation) -> bool:
    """
    Table-driven truth value of a background atom.

    Raises:
        UnboundValuationError: If a free variable of ``atom`` is not bound by ``valuation``
    """
    head, args = spine(atom)
    if not isinstance(head, Sym):
        raise PreconditionViolatedError(f"not a background atom: {show(atom)}")
    return struct.holds(head.name, [eval_ground(struct, a, valuation) for a in args])


def valuations(variables: Sequence[Var], carrier: Sequence[Element]) -> Iterator[dict[str, Element]]:
    """All valuations of ``variables`` over ``carrier`` in lexicographic order."""
    for values in itertools.product(carrier, repeat=len(variables)):
        yield {v.name: e for v, e in zip(variables, values, strict=True)}


def satisfying_valuation(struct: FiniteStructure, atoms: Sequence[Term]) -> dict[str, Element] | None:
    """The lexicographically first valuation satisfying every atom, if any."""
    for valuation in valuations(ordered_free_vars(atoms), struct.carrier):
        if all(eval_background(struct, a, valuation) for a in atoms):
            return valuation
    return None


@dataclass(frozen=True)
class Evidence:
    """The goal satisfied (with its valuation) in one structure of the family."""

    goal: int
    valuation: dict[str, int] | dict[str, Element]
    structure: int | None = None

    def __str__(self) -> str:
        values = ",".join(f"{k}:={v}" for k, v in self.valuation.items())
        where = f"A{self.structure}:" if self.structure is not None else ""
        return f"{where}goal{self.goal}{{{values}}}"


@dataclass(frozen=True)
class Refuted:
    evidence: tuple[Evidence, ...]


@dataclass(frozen=True)
class NotRefuted:
    pass


RefutationResult: TypeAlias = Refuted | NotRefuted


def check_background(theory: TheoryHandle, atom: Term) -> None:
    """
    Raise unless ``atom`` is a background atom of ``theory``.

    Raises:
        PreconditionViolatedError: If the atom mentions a non-background symbol or variable
    """
    if contains_logical(atom) or any(isinstance(t, Lam) for t in subterms(atom)):
        raise PreconditionViolatedError(f"not a background atom: {show(atom)}")
    if any(isinstance(t, Var) and t.type != INT for t in subterms(atom)):
        raise PreconditionViolatedError(f"not a background atom: {show(atom)}")
    match theory:
        case LiaStandard():
            for t in subterms(atom):
                if isinstance(t, Sym) and not (is_numeral(t.name) or t.name in (*LIA_FUNCTIONS, *LIA_RELATIONS)):
                    raise PreconditionViolatedError(f"{t.name} is not interpreted by the standard model of LIA")
            try:
                linear_atom(atom)
            except LinearizationError as e:
                raise PreconditionViolatedError(f"not a background atom: {show(atom)}") from e
        case Finite(structures=structures):
            known = structures[0].symbols()
            for t in subterms(atom):
                if isinstance(t, Sym) and t.name not in known:
                    raise PreconditionViolatedError(f"not a background atom: {show(atom)}")


def family_refutes(theory: TheoryHandle, goals: Sequence[GoalClause]) -> RefutationResult:
    """
    Decide whether a set of background goal clauses is unsatisfiable in the family.

    Over LIA a single goal whose atoms are jointly satisfiable refutes the set.
    Over a finite family the set is refuted iff every structure satisfies the
    atoms of some goal under some valuation; evidence is ordered by structure.

    Args:
        theory: The background theory
        goals: Goal clauses made of background atoms only

    Returns:
        ``Refuted`` with evidence, or ``NotRefuted``

    Raises:
        PreconditionViolatedError: If a goal contains a foreground atom
    """
    for g in goals:
        for atom in g.atoms:
            check_background(theory, atom)
    match theory:
        case LiaStandard():
            for index, g in enumerate(goals):
                result = lia_conjunction_sat([linear_atom(a) for a in g.atoms])
                if isinstance(result, Sat):
                    return Refuted((Evidence(index, result.witness),))
            return NotRefuted()
        case Finite(structures=structures):
            evidence: list[Evidence] = []
            for s_index, struct in enumerate(structures):
                found = None
                for g_index, g in enumerate(goals):
                    valuation = satisfying_valuation(struct, g.atoms)
                    if valuation is not None:
                        found = Evidence(g_index, valuation, s_index)
                        break
                if found is None:
                    logger.debug(f"No goal is satisfiable in structure {s_index} ({struct})")
                    return NotRefuted()
                evidence.append(found)
            return Refuted(tuple(evidence))
    raise TypeError(f"unknown theory {theory!r}")
