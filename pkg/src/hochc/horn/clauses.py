"""Clause model: atoms, goal and definite clauses, posex and program extraction."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, TypeAlias

from .syntax import (
    INT,
    Bool,
    HochcError,
    Lam,
    Signature,
    Sym,
    Term,
    TypeEnv,
    Var,
    apply,
    conj,
    contains_logical,
    disj,
    exists,
    infer_type,
    numeral,
    ordered_free_vars,
    rename,
    show,
    spine,
    substitute,
    subterms,
    uncurry,
)
from .syntax.substitution import fresh_name

logger = logging.getLogger(__name__)


class NotAnAtomError(HochcError):
    """Raised when a term is not an atom: it contains a logical symbol or is not a formula."""


@dataclass(frozen=True)
class Span:
    """Source location (1-based line and column)."""

    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class AtomKind(Enum):
    BACKGROUND = "background"
    FOREGROUND = "foreground"


@dataclass(frozen=True)
class Atom:
    """A classified atom."""

    term: Term
    kind: AtomKind

    @property
    def is_background(self) -> bool:
        return self.kind is AtomKind.BACKGROUND


def is_background_atom(sig: Signature, a: Term) -> bool:
    """True iff ``a`` is a first-order formula over the background signature and Int variables."""
    for t in subterms(a):
        if isinstance(t, Lam):
            return False
        if isinstance(t, Var) and t.type != INT:
            return False
        if isinstance(t, Sym) and not sig.is_background(t.name):
            return False
    return not contains_logical(a)


def classify_atom(sig: Signature, a: Term) -> Atom:
    """
    Classify ``a`` as a background or foreground atom.

    Raises:
        NotAnAtomError: If ``a`` contains a logical symbol or does not have type ``o``
    """
    if contains_logical(a):
        raise NotAnAtomError(f"not an atom (contains a logical symbol): {show(a)}")
    ty = infer_type(sig, TypeEnv.of(a.free_vars), a)
    if not isinstance(ty, Bool):
        raise NotAnAtomError(f"not an atom (type {ty} instead of Bool): {show(a)}")
    kind = AtomKind.BACKGROUND if is_background_atom(sig, a) else AtomKind.FOREGROUND
    return Atom(a, kind)


def has_variable_head(a: Term) -> bool:
    head, _ = spine(a)
    return isinstance(head, Var)


def head_symbol(a: Term) -> str | None:
    head, _ = spine(a)
    return head.name if isinstance(head, Sym) else None


def merge_duplicates(atoms: Iterable[Term]) -> tuple[Term, ...]:
    """Drop atoms identical to an earlier atom of the same clause."""
    return tuple(dict.fromkeys(atoms))


def canonical_key(atoms: Sequence[Term]) -> tuple[Any, ...]:
    """Identity of a clause up to renaming of its free variables."""
    renaming = {v: Var(f"_{i}", v.type) for i, v in enumerate(ordered_free_vars(atoms))}
    return tuple(rename(a, renaming).alpha_key for a in atoms)


@dataclass(frozen=True)
class GoalClause:
    """``not A1 or ... or not An``; the empty clause is bottom."""

    atoms: tuple[Term, ...]
    span: Span | None = field(default=None, compare=False)

    @property
    def is_empty(self) -> bool:
        return not self.atoms

    @cached_property
    def free_vars(self) -> frozenset[Var]:
        return frozenset().union(*(a.free_vars for a in self.atoms))

    @cached_property
    def key(self) -> tuple[Any, ...]:
        return ("goal", canonical_key(self.atoms))

    def __str__(self) -> str:
        if not self.atoms:
            return "false"
        return "(goal " + " ".join(show(a) for a in self.atoms) + ")"


@dataclass(frozen=True)
class DefiniteClause:
    """``G or R x1 ... xk`` with distinct head variables."""

    body: tuple[Term, ...]
    head_rel: str
    head_args: tuple[Var, ...]
    span: Span | None = field(default=None, compare=False)

    @property
    def head(self) -> Term:
        return apply(Sym(self.head_rel), self.head_args)

    @property
    def goal(self) -> GoalClause:
        return GoalClause(self.body, self.span)

    @cached_property
    def free_vars(self) -> frozenset[Var]:
        return frozenset(self.head_args).union(*(a.free_vars for a in self.body))

    @cached_property
    def key(self) -> tuple[Any, ...]:
        return ("rule", canonical_key((self.head, *self.body)))

    def __str__(self) -> str:
        head = show(self.head)
        if not self.body:
            return f"(rule {head})"
        if len(self.body) == 1:
            return f"(rule (=> {show(self.body[0])} {head}))"
        return "(rule (=> (and " + " ".join(show(a) for a in self.body) + f") {head}))"


Clause: TypeAlias = GoalClause | DefiniteClause


def clause_atoms(c: Clause) -> tuple[Term, ...]:
    return c.atoms if isinstance(c, GoalClause) else (*c.body, c.head)


def canonical_true(sig: Signature) -> Term:
    """The closed formula standing for truth in the theory of ``sig``."""
    return _truth(sig, "=")


def canonical_false(sig: Signature) -> Term:
    """The closed formula standing for falsity in the theory of ``sig``."""
    if sig.numerals:
        return apply(Sym("="), [numeral(0), numeral(1)])
    return _truth(sig, "!=")


def _truth(sig: Signature, rel: str) -> Term:
    if sig.numerals:
        return apply(Sym(rel), [numeral(0), numeral(0)])
    constants = sig.constants()
    if constants:
        c = Sym(constants[0])
        return apply(Sym(rel), [c, c])
    y = Var("y", INT)
    return exists([y], apply(Sym(rel), [y, y]))


def posex(sig: Signature, g: GoalClause, keep_free: Iterable[Var] = ()) -> Term:
    """
    The positive existential formula ``exists ys. A1 and ... and An``.

    ``ys`` are the free variables of ``g`` outside ``keep_free`` in order of
    first occurrence. The empty clause yields the canonical true formula.
    """
    if not g.atoms:
        return canonical_true(sig)
    kept = set(keep_free)
    bound = [v for v in ordered_free_vars(g.atoms) if v not in kept]
    return exists(bound, conj(list(g.atoms)))


@dataclass(frozen=True)
class Program:
    """One parameter list and positive existential body per foreground symbol."""

    params: dict[str, tuple[Var, ...]]
    bodies: dict[str, Term]

    def abstraction(self, rel: str) -> Term:
        """``lambda xs_R. F_R``."""
        body = self.bodies[rel]
        for v in reversed(self.params[rel]):
            body = Lam(v.name, v.type, body)
        return body

    def __str__(self) -> str:
        lines = []
        for rel, body in self.bodies.items():
            params = " ".join(v.name for v in self.params[rel])
            lines.append(f"{rel}({params}) := {show(body)}")
        return "\n".join(lines)


def program_of(sig: Signature, definites: Sequence[DefiniteClause]) -> Program:
    """
    Extract the program of a set of definite clauses.

    The parameters of a symbol are the head variables of its first defining
    clause; later clauses are renamed onto them. Symbols without a defining
    clause get the canonical false body.

    Args:
        sig: Signature whose foreground symbols get an entry each
        definites: Definite clauses in source order

    Returns:
        The program, with disjuncts in source order
    """
    params: dict[str, tuple[Var, ...]] = {}
    disjuncts: dict[str, list[Term]] = {rel: [] for rel in sig.foreground}
    for clause in definites:
        rel = clause.head_rel
        if rel not in params:
            params[rel] = clause.head_args
        disjuncts.setdefault(rel, []).append(posex(sig, _onto_params(clause, params[rel]), params[rel]))
    bodies: dict[str, Term] = {}
    for rel, parts in disjuncts.items():
        if rel not in params:
            arg_types, _ = uncurry(sig.foreground[rel])
            params[rel] = tuple(Var(f"x{i + 1}", t) for i, t in enumerate(arg_types))
        bodies[rel] = disj(parts) if parts else canonical_false(sig)
    logger.debug(f"Extracted program for {len(bodies)} foreground symbols from {len(definites)} definite clauses")
    return Program(params, bodies)


def _onto_params(clause: DefiniteClause, params: tuple[Var, ...]) -> GoalClause:
    if clause.head_args == params:
        return clause.goal
    mapping: dict[Var, Term] = dict(zip(clause.head_args, params, strict=True))
    taken = {p.name for p in params} | {v.name for v in clause.free_vars}
    for v in clause.free_vars:
        if v not in mapping and v.name in {p.name for p in params}:
            name = fresh_name(v.name, taken)
            taken.add(name)
            mapping[v] = Var(name, v.type)
    return GoalClause(tuple(substitute(a, mapping) for a in clause.body), clause.span)

