"""Emitter for SMT-LIB 2 Horn clause files."""

from __future__ import annotations

import re
from typing import TYPE_CHECKING

from ..syntax import Sym, Term, Var, is_numeral, spine
from .base import EmitFormatHandler

if TYPE_CHECKING:
    from .translation_service import FOHornClause, Translation

SIMPLE_SYMBOL = re.compile(r"[A-Za-z~!@$%^&*_+=<>.?/-][0-9A-Za-z~!@$%^&*_+=<>.?/-]*")


def smt_symbol(name: str) -> str:
    """Quote ``name`` with bars unless it is an SMT-LIB simple symbol."""
    if SIMPLE_SYMBOL.fullmatch(name) and not name.startswith(("@", ".")):
        return name
    return f"|{name}|"


def smt_term(m: Term) -> str:
    head, args = spine(m)
    if isinstance(head, Sym) and head.name == "!=" and len(args) == 2:
        return f"(not (= {smt_term(args[0])} {smt_term(args[1])}))"
    match head:
        case Sym(name=name) if is_numeral(name):
            text = name if not name.startswith("-") else f"(- {name[1:]})"
        case Sym(name=name) | Var(name=name):
            text = smt_symbol(name)
        case _:
            raise ValueError(f"not a first-order term: {m}")
    if not args:
        return text
    return f"({text} {' '.join(smt_term(a) for a in args)})"


class SmtLibFormatHandler(EmitFormatHandler):
    """Handler for SMT-LIB 2 with logic HORN: one universally closed implication per clause."""

    @property
    def format_name(self) -> str:
        return "SMT-LIB 2"

    @property
    def format_id(self) -> str:
        return "smtlib"

    @property
    def file_extension(self) -> str:
        return ".smt2"

    def emit(self, translation: Translation) -> str:
        lines = ["(set-logic HORN)"]
        lines.extend(f"(declare-sort {smt_symbol(sort)} 0)" for sort in translation.sorts)
        for name, args, result in self.declared_functions(translation):
            arg_sorts = " ".join(smt_symbol(str(a)) for a in args)
            lines.append(f"(declare-fun {smt_symbol(name)} ({arg_sorts}) {smt_symbol(str(result))})")
        lines.extend(f"(assert {self.clause(c)})" for c in translation.clauses)
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"

    @staticmethod
    def clause(c: FOHornClause) -> str:
        head = smt_term(c.positive) if c.positive is not None else "false"
        if not c.negative:
            body = head
        elif len(c.negative) == 1:
            body = f"(=> {smt_term(c.negative[0])} {head})"
        else:
            body = f"(=> (and {' '.join(smt_term(a) for a in c.negative)}) {head})"
        variables = c.variables
        if not variables:
            return body
        binders = " ".join(f"({smt_symbol(v.name)} {smt_symbol(str(v.type))})" for v in variables)
        return f"(forall ({binders}) {body})"
