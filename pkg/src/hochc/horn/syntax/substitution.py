"""Capture-avoiding substitution and beta reduction."""

from __future__ import annotations

from collections.abc import Iterable, Mapping

from .errors import TypingError
from .signature import Signature, TypeEnv, infer_type
from .terms import App, Lam, Term, Var, apply, show, spine

Bindings = Mapping[Var, Term] | Iterable[tuple[Var, Term]]


def fresh_name(base: str, avoid: set[str]) -> str:
    """``base`` with primes appended until it is not in ``avoid``."""
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def substitute(m: Term, bindings: Bindings, sig: Signature | None = None) -> Term:
    """
    Simultaneous capture-avoiding substitution ``m[N1/x1, ..., Nn/xn]``.

    Args:
        m: The term to substitute into
        bindings: Pairs of variable and replacement term
        sig: When given, each replacement is type-checked against its variable

    Returns:
        The substituted term

    Raises:
        TypingError: If ``sig`` is given and a replacement has the wrong type
    """
    mapping = dict(bindings.items() if isinstance(bindings, Mapping) else bindings)
    if sig is not None:
        for var, replacement in mapping.items():
            found = infer_type(sig, TypeEnv.of(replacement.free_vars), replacement)
            if found != var.type:
                raise TypingError(f"{var.name} := {show(replacement)}", str(var.type), str(found))
    return _subst(m, mapping)


def _subst(m: Term, mapping: dict[Var, Term]) -> Term:
    live = {v: t for v, t in mapping.items() if v in m.free_vars}
    if not live:
        return m
    match m:
        case Var():
            return live[m]
        case App(fn=fn, arg=arg):
            return App(_subst(fn, live), _subst(arg, live))
        case Lam(param=param, param_type=ty, body=body):
            incoming = {v.name for t in live.values() for v in t.free_vars}
            if param not in incoming:
                return Lam(param, ty, _subst(body, live))
            avoid = incoming | {v.name for v in body.free_vars} | {v.name for v in live}
            renamed = fresh_name(param, avoid)
            return Lam(renamed, ty, _subst(body, {**live, m.bound: Var(renamed, ty)}))
    return m


def rename(m: Term, renaming: Mapping[Var, Var]) -> Term:
    return _subst(m, dict(renaming))


def beta_reduce_head(m: Term) -> Term | None:
    """One beta step at the head: ``(lambda x. L) N Ns`` becomes ``L[N/x] Ns``."""
    head, args = spine(m)
    if not isinstance(head, Lam) or not args:
        return None
    return apply(_subst(head.body, {head.bound: args[0]}), args[1:])


def beta_normal_form(m: Term) -> Term:
    """Normal-order beta normalisation."""
    head, args = spine(m)
    while isinstance(head, Lam) and args:
        m = apply(_subst(head.body, {head.bound: args[0]}), args[1:])
        head, args = spine(m)
    if isinstance(head, Lam):
        return Lam(head.param, head.param_type, beta_normal_form(head.body))
    return apply(head, [beta_normal_form(a) for a in args])
