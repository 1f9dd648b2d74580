"""Terms of relational higher-order logic.

Terms are immutable. Two terms compare equal iff they are alpha-equivalent:
equality and hashing go through a canonical key in which bound variables are
replaced by de Bruijn indices, while the surface names are kept for printing.
Variables carry their (argument) type.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

from .types import Type

NUMERAL_RE = re.compile(r"^-?\d+$")


class Term:
    """Base class of all term variants."""

    @cached_property
    def alpha_key(self) -> tuple[Any, ...]:
        """Canonical key: equal keys iff the terms are alpha-equivalent."""
        return _key(self, ())

    @cached_property
    def free_vars(self) -> frozenset[Var]:
        """Free variables of the term."""
        return frozenset(_free(self))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Term):
            return NotImplemented
        return self is other or self.alpha_key == other.alpha_key

    def __hash__(self) -> int:
        return hash(self.alpha_key)

    def __str__(self) -> str:
        return show(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {show(self)}>"


@dataclass(frozen=True, eq=False, repr=False)
class Var(Term):
    """A typed variable."""

    name: str
    type: Type


@dataclass(frozen=True, eq=False, repr=False)
class Sym(Term):
    """A signature symbol (background or foreground), including numerals."""

    name: str


@dataclass(frozen=True, eq=False, repr=False)
class Neg(Term):
    """The logical constant ``not : o -> o``."""


@dataclass(frozen=True, eq=False, repr=False)
class And(Term):
    """The logical constant ``and : o -> o -> o``."""


@dataclass(frozen=True, eq=False, repr=False)
class Or(Term):
    """The logical constant ``or : o -> o -> o``."""


@dataclass(frozen=True, eq=False, repr=False)
class Exists(Term):
    """The logical constant ``exists_tau : (tau -> o) -> o``."""

    arg_type: Type


@dataclass(frozen=True, eq=False, repr=False)
class App(Term):
    """Application ``fn arg``."""

    fn: Term
    arg: Term


@dataclass(frozen=True, eq=False, repr=False)
class Lam(Term):
    """Abstraction ``lambda param. body`` with the parameter's type."""

    param: str
    param_type: Type
    body: Term

    @property
    def bound(self) -> Var:
        return Var(self.param, self.param_type)


LOGICAL = (Neg, And, Or, Exists)


def _key(m: Term, bound: tuple[tuple[str, Type], ...]) -> tuple[Any, ...]:
    match m:
        case Var(name=name, type=ty):
            for depth, b in enumerate(reversed(bound)):
                if b == (name, ty):
                    return ("b", depth)
            return ("v", name, ty)
        case Sym(name=name):
            return ("s", name)
        case Neg():
            return ("not",)
        case And():
            return ("and",)
        case Or():
            return ("or",)
        case Exists(arg_type=ty):
            return ("ex", ty)
        case App(fn=fn, arg=arg):
            return ("app", _key(fn, bound), _key(arg, bound))
        case Lam(param=param, param_type=ty, body=body):
            return ("lam", ty, _key(body, (*bound, (param, ty))))
    raise TypeError(f"not a term: {m!r}")


def _free(m: Term) -> Iterator[Var]:
    match m:
        case Var():
            yield m
        case App(fn=fn, arg=arg):
            yield from fn.free_vars
            yield from arg.free_vars
        case Lam(body=body):
            bound = m.bound
            yield from (v for v in body.free_vars if v != bound)


def numeral(n: int) -> Sym:
    """The numeral symbol for ``n``."""
    return Sym(str(n))


def is_numeral(name: str) -> bool:
    return NUMERAL_RE.match(name) is not None


def spine(m: Term) -> tuple[Term, list[Term]]:
    """Decompose ``h N1 ... Nk`` (h not an application) into ``(h, [N1..Nk])``."""
    args: list[Term] = []
    while isinstance(m, App):
        args.append(m.arg)
        m = m.fn
    args.reverse()
    return m, args


def apply(head: Term, args: Iterable[Term]) -> Term:
    """Left-associated application ``head a1 ... an``."""
    for a in args:
        head = App(head, a)
    return head


def lambdas(params: Sequence[Var], body: Term) -> Term:
    """``lambda x1 ... xn. body``."""
    for v in reversed(params):
        body = Lam(v.name, v.type, body)
    return body


def neg(m: Term) -> Term:
    return App(Neg(), m)


def conj(terms: Sequence[Term]) -> Term:
    """Left-nested conjunction; callers handle the empty case."""
    if not terms:
        raise ValueError("empty conjunction")
    result = terms[0]
    for t in terms[1:]:
        result = App(App(And(), result), t)
    return result


def disj(terms: Sequence[Term]) -> Term:
    """Left-nested disjunction; callers handle the empty case."""
    if not terms:
        raise ValueError("empty disjunction")
    result = terms[0]
    for t in terms[1:]:
        result = App(App(Or(), result), t)
    return result


def exists(variables: Sequence[Var], body: Term) -> Term:
    """``exists x1. ... exists xn. body``."""
    for v in reversed(variables):
        body = App(Exists(v.type), Lam(v.name, v.type, body))
    return body


def subterms(m: Term) -> Iterator[Term]:
    """Pre-order traversal of all subterms (under binders too)."""
    stack = [m]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, App):
            stack.append(t.arg)
            stack.append(t.fn)
        elif isinstance(t, Lam):
            stack.append(t.body)


def size(m: Term) -> int:
    return sum(1 for _ in subterms(m))


def contains_lambda(m: Term) -> bool:
    return any(isinstance(t, Lam) for t in subterms(m))


def contains_logical(m: Term) -> bool:
    return any(isinstance(t, LOGICAL) for t in subterms(m))


def is_positive_existential(m: Term) -> bool:
    """True iff the negation constant does not occur in ``m``."""
    return not any(isinstance(t, Neg) for t in subterms(m))


def symbols(m: Term) -> set[str]:
    return {t.name for t in subterms(m) if isinstance(t, Sym)}


def ordered_free_vars(terms: Iterable[Term]) -> list[Var]:
    """Free variables in order of first (left-to-right) occurrence."""
    seen: dict[Var, None] = {}
    for m in terms:
        _collect_ordered(m, frozenset(), seen)
    return list(seen)


def _collect_ordered(m: Term, bound: frozenset[Var], seen: dict[Var, None]) -> None:
    match m:
        case Var():
            if m not in bound:
                seen.setdefault(m, None)
        case App(fn=fn, arg=arg):
            _collect_ordered(fn, bound, seen)
            _collect_ordered(arg, bound, seen)
        case Lam(body=body):
            _collect_ordered(body, bound | {m.bound}, seen)


def show(m: Term) -> str:
    """Render ``m`` in the S-expression surface syntax."""
    match m:
        case Var(name=name) | Sym(name=name):
            return name
        case Neg():
            return "not"
        case And():
            return "and"
        case Or():
            return "or"
        case Exists(arg_type=ty):
            return f"(exists-fn {ty})"
        case Lam():
            params: list[str] = []
            body: Term = m
            while isinstance(body, Lam):
                params.append(f"({body.param} {body.param_type})")
                body = body.body
            return f"(lambda ({' '.join(params)}) {show(body)})"
    head, args = spine(m)
    if isinstance(head, Neg) and len(args) == 1:
        return f"(not {show(args[0])})"
    if isinstance(head, (And, Or)) and len(args) == 2:
        op = "and" if isinstance(head, And) else "or"
        return f"({op} {' '.join(show(t) for t in _flatten_binary(m, type(head)))})"
    if isinstance(head, Exists) and len(args) == 1 and isinstance(args[0], Lam):
        binders: list[str] = []
        body = m
        while True:
            h, a = spine(body)
            if not (isinstance(h, Exists) and len(a) == 1 and isinstance(a[0], Lam)):
                break
            binders.append(f"({a[0].param} {a[0].param_type})")
            body = a[0].body
        return f"(exists ({' '.join(binders)}) {show(body)})"
    return "(" + " ".join(show(t) for t in [head, *args]) + ")"


def _flatten_binary(m: Term, op: type) -> list[Term]:
    """Operands of a left-nested chain of ``op``."""
    operands: list[Term] = []
    while True:
        head, args = spine(m)
        if isinstance(head, op) and len(args) == 2:
            operands.append(args[1])
            m = args[0]
        else:
            operands.append(m)
            break
    operands.reverse()
    return operands
