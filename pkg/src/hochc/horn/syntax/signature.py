"""Signatures, type environments and the typing judgement."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

from .errors import SignatureError, TypingError, UnboundNameError
from .terms import And, App, Exists, Lam, Neg, Or, Sym, Term, Var, is_numeral, show
from .types import BOOL, INT, Arrow, Bool, Type, arrow, is_argument, is_first_order, is_relational

logger = logging.getLogger(__name__)

LOGICAL_NAMES = frozenset({"not", "and", "or", "exists", "lambda", "=>"})

LIA_FUNCTIONS = ("+", "-", "*")
LIA_RELATIONS = ("<", "<=", "=", "!=", ">=", ">")
EQUALITY_RELATIONS = ("=", "!=")


@dataclass(frozen=True)
class Signature:
    """A background (first-order) and a foreground (relational) signature.

    When ``numerals`` is set, every integer literal is an implicit background
    constant of type ``Int``.
    """

    background: Mapping[str, Type] = field(default_factory=dict)
    foreground: Mapping[str, Type] = field(default_factory=dict)
    numerals: bool = False

    def __post_init__(self) -> None:
        clash = set(self.background) & set(self.foreground)
        if clash:
            raise SignatureError(f"symbols declared both background and foreground: {', '.join(sorted(clash))}")
        for name in (*self.background, *self.foreground):
            if name in LOGICAL_NAMES:
                raise SignatureError(f"'{name}' is a logical symbol and cannot be declared")
        for name, ty in self.background.items():
            if not is_first_order(ty):
                raise SignatureError(f"background symbol {name} has non-first-order type {ty}")
        for name, ty in self.foreground.items():
            if not is_relational(ty):
                raise SignatureError(f"foreground symbol {name} has non-relational type {ty}")

    def type_of(self, name: str) -> Type | None:
        if name in self.background:
            return self.background[name]
        if name in self.foreground:
            return self.foreground[name]
        if self.numerals and is_numeral(name):
            return INT
        return None

    def is_background(self, name: str) -> bool:
        return name in self.background or (self.numerals and is_numeral(name))

    def is_foreground(self, name: str) -> bool:
        return name in self.foreground

    def constants(self) -> list[str]:
        """Declared background constants of type ``Int``, in declaration order."""
        return [name for name, ty in self.background.items() if ty == INT]

    def with_foreground(self, extra: Mapping[str, Type]) -> Signature:
        return Signature(self.background, {**self.foreground, **extra}, self.numerals)

    def with_background(self, extra: Mapping[str, Type]) -> Signature:
        return Signature({**self.background, **extra}, self.foreground, self.numerals)


def lia_background(constants: Iterable[str] = ()) -> dict[str, Type]:
    """The LIA signature, plus the given uninterpreted constants of type Int."""
    background: dict[str, Type] = {op: arrow(INT, INT, INT) for op in LIA_FUNCTIONS}
    background.update({rel: arrow(INT, INT, BOOL) for rel in LIA_RELATIONS})
    background.update({c: INT for c in constants})
    return background


def equality_background(constants: Iterable[str] = ()) -> dict[str, Type]:
    """Constants plus equality and disequality over Int."""
    background: dict[str, Type] = {rel: arrow(INT, INT, BOOL) for rel in EQUALITY_RELATIONS}
    background.update({c: INT for c in constants})
    return background


class TypeEnv:
    """A map from variable names to argument types.

    ``fresh`` extends the environment with a name that collides neither with a
    name already bound here nor with any name passed in ``reserved``.
    """

    def __init__(self, bindings: Mapping[str, Type] | None = None, reserved: Iterable[str] = ()) -> None:
        self._types: dict[str, Type] = dict(bindings or {})
        self._reserved = set(reserved)
        self._counter = 0

    @classmethod
    def of(cls, variables: Iterable[Var]) -> TypeEnv:
        return cls({v.name: v.type for v in variables})

    def __getitem__(self, name: str) -> Type:
        return self._types[name]

    def __contains__(self, name: object) -> bool:
        return name in self._types

    def __iter__(self) -> Iterator[str]:
        return iter(self._types)

    def __len__(self) -> int:
        return len(self._types)

    def get(self, name: str) -> Type | None:
        return self._types.get(name)

    def items(self) -> Iterable[tuple[str, Type]]:
        return self._types.items()

    def extend(self, name: str, ty: Type) -> TypeEnv:
        env = TypeEnv(self._types, self._reserved)
        env._types[name] = ty
        env._counter = self._counter
        return env

    def fresh(self, base: str, ty: Type) -> Var:
        """A variable ``base_k`` not yet bound; binds it."""
        stem = base.split("_")[0] or "v"
        while True:
            self._counter += 1
            name = f"{stem}_{self._counter}"
            if name not in self._types and name not in self._reserved:
                self._types[name] = ty
                return Var(name, ty)


def infer_type(sig: Signature, env: TypeEnv, m: Term) -> Type:
    """
    Infer the unique type of ``m`` under ``sig`` and ``env``.

    Args:
        sig: Signature giving the types of symbols
        env: Types of the free variables of ``m``
        m: The term to type

    Returns:
        The type of ``m``

    Raises:
        UnboundNameError: If a symbol or variable is not declared
        TypingError: If a typing rule is violated
    """
    match m:
        case Var(name=name, type=ty):
            declared = env.get(name)
            if declared is None:
                raise UnboundNameError(name)
            if declared != ty:
                raise TypingError(name, str(declared), str(ty))
            return ty
        case Sym(name=name):
            ty_sym = sig.type_of(name)
            if ty_sym is None:
                raise UnboundNameError(name)
            return ty_sym
        case Neg():
            return Arrow(BOOL, BOOL)
        case And() | Or():
            return arrow(BOOL, BOOL, BOOL)
        case Exists(arg_type=ty):
            if not is_argument(ty):
                raise TypingError(show(m), "an argument type", str(ty))
            return Arrow(Arrow(ty, BOOL), BOOL)
        case App(fn=fn, arg=arg):
            fn_ty = infer_type(sig, env, fn)
            if not isinstance(fn_ty, Arrow):
                raise TypingError(show(m), f"a function in head position, applied to {show(arg)}", str(fn_ty))
            arg_ty = infer_type(sig, env, arg)
            if arg_ty != fn_ty.arg:
                raise TypingError(show(m), str(fn_ty.arg), str(arg_ty))
            return fn_ty.result
        case Lam(param=param, param_type=ty, body=body):
            if not is_argument(ty):
                raise TypingError(show(m), "an argument type for the bound variable", str(ty))
            body_ty = infer_type(sig, env.extend(param, ty), body)
            if not is_relational(body_ty):
                raise TypingError(show(m), "a relational body", str(body_ty))
            return Arrow(ty, body_ty)
    raise TypingError(repr(m), "a term", type(m).__name__)


def check_type(sig: Signature, env: TypeEnv, m: Term, expected: Type) -> None:
    """Raise ``TypingError`` unless ``m`` has type ``expected``."""
    found = infer_type(sig, env, m)
    if found != expected:
        raise TypingError(show(m), str(expected), str(found))


def is_formula(sig: Signature, m: Term) -> bool:
    """True iff ``m`` is well typed at ``o`` in the environment of its free variables."""
    try:
        return isinstance(infer_type(sig, TypeEnv.of(m.free_vars), m), Bool)
    except (TypingError, UnboundNameError):
        return False
