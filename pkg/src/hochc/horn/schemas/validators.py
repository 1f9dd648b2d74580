"""Validation functions for clauses."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..clauses import Clause, GoalClause, Span
from ..syntax import (
    BOOL,
    HochcError,
    Lam,
    Signature,
    Term,
    TypeEnv,
    check_type,
    contains_logical,
    ordered_free_vars,
    show,
    spine,
    uncurry,
)
from ..syntax.types import is_argument

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Diagnostic:
    """A validation message with the location of the offending clause."""

    message: str
    span: Span | None = None

    def __str__(self) -> str:
        return f"{self.span}: {self.message}" if self.span is not None else self.message


def _check_atom(sig: Signature, env: TypeEnv, atom: Term) -> str | None:
    if contains_logical(atom):
        return f"atom {show(atom)} contains a logical symbol"
    head, args = spine(atom)
    if isinstance(head, Lam) and args:
        return f"lambda abstraction in head position of {show(atom)}; only atom arguments may be abstractions"
    try:
        check_type(sig, env, atom, BOOL)
    except HochcError as e:
        return f"atom {show(atom)}: {e}"
    return None


def validate(sig: Signature, clause: Clause) -> list[Diagnostic]:
    """
    Validate a clause and return a list of diagnostics.

    Returns an empty list iff the clause is a well-typed higher-order
    constrained Horn clause.
    """
    errors: list[str] = []
    atoms = clause.atoms if isinstance(clause, GoalClause) else clause.body
    variables = ordered_free_vars(atoms if isinstance(clause, GoalClause) else (*atoms, *clause.head_args))

    # Variables must have argument types and one type per name
    seen: dict[str, object] = {}
    for v in variables:
        if not is_argument(v.type):
            errors.append(f"variable {v.name} has type {v.type}, which is not an argument type")
        if seen.setdefault(v.name, v.type) != v.type:
            errors.append(f"variable {v.name} is used at types {seen[v.name]} and {v.type}")
        if sig.type_of(v.name) is not None:
            errors.append(f"variable {v.name} clashes with a declared symbol")
    env = TypeEnv.of(variables)

    if isinstance(clause, GoalClause) and clause.is_empty:
        errors.append("the empty clause is not allowed as input")

    for atom in atoms:
        problem = _check_atom(sig, env, atom)
        if problem is not None:
            errors.append(problem)

    if not isinstance(clause, GoalClause):
        rel = clause.head_rel
        if sig.is_background(rel):
            errors.append(f"head symbol {rel} belongs to the background signature")
        elif not sig.is_foreground(rel):
            errors.append(f"head symbol {rel} is not a declared relation")
        else:
            arg_types, _ = uncurry(sig.foreground[rel])
            names = [v.name for v in clause.head_args]
            if len(set(names)) != len(names):
                errors.append(f"head variables of {rel} are not distinct: {' '.join(names)}")
            if len(arg_types) != len(clause.head_args):
                errors.append(f"{rel} takes {len(arg_types)} arguments, head has {len(clause.head_args)}")
            else:
                for v, ty in zip(clause.head_args, arg_types, strict=True):
                    if v.type != ty:
                        errors.append(f"head variable {v.name} has type {v.type}, {rel} expects {ty}")

    if errors:
        logger.warning(f"Clause validation failed with {len(errors)} errors")
    else:
        logger.debug("Clause validation passed")

    return [Diagnostic(message, clause.span) for message in errors]


def validate_all(sig: Signature, clauses: list[Clause]) -> list[Diagnostic]:
    """Diagnostics for every clause, in order."""
    return [d for c in clauses for d in validate(sig, c)]

