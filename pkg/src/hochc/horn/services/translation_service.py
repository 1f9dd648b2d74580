"""First-order translation of lambda-free clause sets.

Every relational type becomes a sort, relation symbols become constants of
those sorts, application is made explicit by one ``app`` symbol per arrow
type, and truth of an element of the sort of ``o`` is the predicate ``H``.
Comprehension axioms assert that every relational variable type is
inhabited by an element true everywhere.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from ..clauses import Clause, GoalClause, is_background_atom
from ..syntax import (
    BOOL,
    INT,
    App,
    Arrow,
    Base,
    Bool,
    HochcError,
    Lam,
    Signature,
    Sym,
    Term,
    Type,
    Var,
    apply,
    arrow,
    contains_lambda,
    contains_logical,
    ordered_free_vars,
    show,
    spine,
    subterms,
    uncurry,
)

logger = logging.getLogger(__name__)

TRUTH = "H"


class TranslationError(HochcError):
    """Raised when a clause cannot be translated."""


class LambdaPresentError(TranslationError):
    """Raised when a term still contains a lambda abstraction (lift it first)."""


def type_code(ty: Type) -> str:
    """Canonical mangled name of a type: ``i`` for Int, ``o`` for Bool, wrapped arguments then ``o``."""
    match ty:
        case Base():
            return "i" if ty == INT else f"S{ty.name}E"
        case Bool():
            return "o"
        case Arrow():
            args, _ = uncurry(ty)
            return "".join(_wrap(a) for a in args) + "o"
    raise TypeError(f"not a type: {ty!r}")


def _wrap(ty: Type) -> str:
    return type_code(ty) if isinstance(ty, Base) else f"L{type_code(ty)}J"


def floor_type(ty: Type) -> Base:
    """The sort of a type: base sorts stay, relational types get ``R_<code>``."""
    if isinstance(ty, Base):
        return ty
    return Base(f"R_{type_code(ty)}")


def app_symbol(ty: Arrow) -> str:
    return f"app_{type_code(ty)}"


def relation_constant(name: str) -> str:
    return f"c_{name}"


def comprehension_constant(ty: Type) -> str:
    return f"comp_{type_code(ty)}"


@dataclass(frozen=True)
class FOHornClause:
    """``not N1 or ... or not Nk or P``; ``positive`` is None for goal clauses."""

    negative: tuple[Term, ...]
    positive: Term | None

    @property
    def variables(self) -> list[Var]:
        return ordered_free_vars([*self.negative, *([self.positive] if self.positive is not None else [])])

    def __str__(self) -> str:
        body = " ".join(f"(not {show(a)})" for a in self.negative)
        head = show(self.positive) if self.positive is not None else "false"
        return f"{body} {head}".strip() if body else head


@dataclass(frozen=True)
class Translation:
    """Result of the translation: the first-order signature and clauses."""

    signature: Signature
    sorts: tuple[str, ...]
    clauses: tuple[FOHornClause, ...]
    comprehension_types: tuple[Type, ...]


class _Translator:
    def __init__(self, sig: Signature) -> None:
        self.sig = sig
        self.functions: dict[str, Type] = {}
        self.sorts: dict[str, None] = {}

    def use_sort(self, ty: Type) -> Base:
        sort = floor_type(ty)
        if sort != INT:
            self.sorts.setdefault(sort.name, None)
        return sort

    def declare(self, name: str, ty: Type) -> Sym:
        self.functions.setdefault(name, ty)
        return Sym(name)

    def app(self, ty: Arrow) -> Sym:
        sort = arrow(self.use_sort(ty), self.use_sort(ty.arg), self.use_sort(ty.result))
        return self.declare(app_symbol(ty), sort)

    def type_of_head(self, head: Term) -> Type:
        if isinstance(head, Var):
            return head.type
        if isinstance(head, Sym):
            ty = self.sig.type_of(head.name)
            if ty is not None:
                return ty
        raise TranslationError(f"cannot translate head {show(head)}")

    def term(self, m: Term) -> Term:
        """The translation of a lambda-free, logical-symbol-free term."""
        if contains_lambda(m):
            raise LambdaPresentError(f"lambda abstraction in {show(m)}; run lift first")
        if contains_logical(m):
            raise TranslationError(f"logical symbol in {show(m)}")
        head, args = spine(m)
        if isinstance(head, Sym) and self.sig.is_background(head.name):
            ty = self.sig.type_of(head.name)
            assert ty is not None  # noqa: S101
            self.declare(head.name, ty)
            return apply(head, [self.term(a) for a in args])
        ty = self.type_of_head(head)
        if isinstance(head, Var):
            result: Term = Var(head.name, self.use_sort(ty))
        else:
            result = self.declare(relation_constant(head.name), self.use_sort(ty))
        for a in args:
            assert isinstance(ty, Arrow)  # noqa: S101
            app = self.app(ty)
            result = App(App(app, result), self.term(a))
            ty = ty.result
        return result

    def atom(self, a: Term) -> Term:
        if is_background_atom(self.sig, a):
            return self.term(a)
        self.declare(TRUTH, arrow(self.use_sort(BOOL), BOOL))
        return App(Sym(TRUTH), self.term(a))

    def clause(self, c: Clause) -> FOHornClause:
        if isinstance(c, GoalClause):
            return FOHornClause(tuple(self.atom(a) for a in c.atoms), None)
        return FOHornClause(tuple(self.atom(a) for a in c.body), self.atom(c.head))

    def comprehension(self, rho: Type) -> FOHornClause:
        arg_types, _ = uncurry(rho)
        self.declare(TRUTH, arrow(self.use_sort(BOOL), BOOL))
        result: Term = self.declare(comprehension_constant(rho), self.use_sort(rho))
        ty = rho
        for i, arg_type in enumerate(arg_types, start=1):
            assert isinstance(ty, Arrow)  # noqa: S101
            app = self.app(ty)
            result = App(App(app, result), Var(f"x{i}", self.use_sort(arg_type)))
            ty = ty.result
        return FOHornClause((), App(Sym(TRUTH), result))


def floor_term(sig: Signature, m: Term) -> Term:
    """
    Translate a lambda-free term.

    Raises:
        LambdaPresentError: If ``m`` contains a lambda abstraction
    """
    return _Translator(sig).term(m)


def floor_clause(sig: Signature, c: Clause) -> FOHornClause:
    """
    Translate a clause: background atoms are kept, a foreground atom ``A`` becomes ``H A'``.

    Raises:
        LambdaPresentError: If the clause contains a lambda abstraction
    """
    return _Translator(sig).clause(c)


def comprehension_axiom(sig: Signature, rho: Type) -> FOHornClause:
    """The unit clause ``H (app ... (app comp_rho x1) ... xn)``."""
    return _Translator(sig).comprehension(rho)


def relational_variable_types(clauses: Sequence[Clause]) -> list[Type]:
    """Types of relational variables occurring in the clauses, in order of first occurrence."""
    seen: dict[Type, None] = {}
    for c in clauses:
        atoms = c.atoms if isinstance(c, GoalClause) else (*c.body, c.head)
        for atom in atoms:
            for t in subterms(atom):
                if isinstance(t, Var) and not isinstance(t.type, Base):
                    seen.setdefault(t.type, None)
                if isinstance(t, Lam) and not isinstance(t.param_type, Base):
                    seen.setdefault(t.param_type, None)
    return list(seen)


def translate(sig: Signature, clauses: Sequence[Clause]) -> Translation:
    """
    Translate a lambda-free clause set to first-order Horn clauses.

    Args:
        sig: Signature of the clause set
        clauses: Validated, lambda-free clauses

    Returns:
        The first-order signature, the sorts in order of first use, the
        translated clauses followed by one comprehension axiom per relational
        variable type

    Raises:
        LambdaPresentError: If some clause contains a lambda abstraction
    """
    translator = _Translator(sig)
    for name, ty in sig.foreground.items():
        translator.declare(relation_constant(name), translator.use_sort(ty))
    translated = [translator.clause(c) for c in clauses]
    comp_types = relational_variable_types(clauses)
    translated.extend(translator.comprehension(rho) for rho in comp_types)
    fo_sig = Signature(background=dict(translator.functions), numerals=sig.numerals)
    logger.info(f"Translated {len(clauses)} clauses with {len(comp_types)} comprehension axioms")
    return Translation(fo_sig, tuple(translator.sorts), tuple(translated), tuple(comp_types))

