"""Lambda lifting: replace lambda abstractions by fresh defined relation symbols."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from ..clauses import Clause, DefiniteClause, GoalClause
from ..syntax import (
    App,
    Lam,
    Signature,
    Sym,
    Term,
    TypeEnv,
    Var,
    apply,
    arrow,
    contains_lambda,
    infer_type,
    ordered_free_vars,
    uncurry,
)
from ..syntax.substitution import fresh_name

logger = logging.getLogger(__name__)

LIFTED_PREFIX = "_lam"


@dataclass(frozen=True)
class LiftResult:
    signature: Signature
    clauses: tuple[Clause, ...]
    introduced: tuple[str, ...]


def _innermost(m: Term) -> Lam | None:
    """The leftmost lambda whose body is lambda-free."""
    match m:
        case App(fn=fn, arg=arg):
            return _innermost(fn) or _innermost(arg)
        case Lam(body=body):
            return _innermost(body) or m
    return None


def _replace(m: Term, target: Lam, replacement: Term) -> tuple[Term, bool]:
    """Replace the first occurrence (by identity) of ``target`` in ``m``."""
    if m is target:
        return replacement, True
    match m:
        case App(fn=fn, arg=arg):
            new_fn, done = _replace(fn, target, replacement)
            if done:
                return App(new_fn, arg), True
            new_arg, done = _replace(arg, target, replacement)
            return (App(fn, new_arg), True) if done else (m, False)
        case Lam(param=param, param_type=ty, body=body):
            new_body, done = _replace(body, target, replacement)
            return (Lam(param, ty, new_body), True) if done else (m, False)
    return m, False


def _define(sig: Signature, lam: Lam, name: str) -> tuple[Term, DefiniteClause, Signature]:
    """Fresh symbol ``name`` for ``lambda y. M`` with its defining clause ``not (M zs) or name xs y zs``."""
    outer = ordered_free_vars([lam])
    y = lam.bound
    env = TypeEnv.of([*outer, y])
    body_type = infer_type(sig, env, lam.body)
    rest_types, _ = uncurry(body_type)
    taken = {v.name for v in outer} | {y.name}
    zs: list[Var] = []
    for ty in rest_types:
        z = fresh_name("z", taken)
        taken.add(z)
        zs.append(Var(z, ty))
    symbol_type = arrow(*(v.type for v in outer), y.type, body_type)
    sig = sig.with_foreground({name: symbol_type})
    definition = DefiniteClause((apply(lam.body, zs),), name, (*outer, y, *zs))
    return apply(Sym(name), outer), definition, sig


def lift(sig: Signature, clauses: Sequence[Clause]) -> LiftResult:
    """
    Eliminate every lambda abstraction from the clause set.

    Innermost abstractions are lifted first, in clause and atom order. Each
    occurrence gets its own symbol ``_lam<k>`` and defining clause; defining
    clauses are appended after the input clauses in creation order.

    Args:
        sig: The signature of the clause set
        clauses: Validated clauses

    Returns:
        The extended signature, the lambda-free clauses and the new symbols
    """
    result: list[Clause] = list(clauses)
    introduced: list[str] = []
    position = 0
    while position < len(result):
        clause = result[position]
        atoms = clause.atoms if isinstance(clause, GoalClause) else clause.body
        atom_index = next((i for i, a in enumerate(atoms) if contains_lambda(a)), None)
        if atom_index is None:
            position += 1
            continue
        lam = _innermost(atoms[atom_index])
        assert lam is not None  # noqa: S101
        name = f"{LIFTED_PREFIX}{len(introduced)}"
        while sig.type_of(name) is not None:
            name += "'"
        replacement, definition, sig = _define(sig, lam, name)
        new_atom, _ = _replace(atoms[atom_index], lam, replacement)
        new_atoms = (*atoms[:atom_index], new_atom, *atoms[atom_index + 1 :])
        if isinstance(clause, GoalClause):
            result[position] = GoalClause(new_atoms, clause.span)
        else:
            result[position] = DefiniteClause(new_atoms, clause.head_rel, clause.head_args, clause.span)
        result.append(definition)
        introduced.append(name)
        logger.debug(f"Lifted {lam} to {name}")
    logger.info(f"Lambda lifting introduced {len(introduced)} symbols")
    return LiftResult(sig, tuple(result), tuple(introduced))
