"""Simple types of relational higher-order logic.

Types are generated by base sorts, the type ``o`` of truth values and the
arrow. Argument types are base sorts and relational types; relational types
are ``o`` and ``tau -> rho`` with ``tau`` an argument type and ``rho``
relational; first-order types are ``iota^n -> iota`` and ``iota^n -> o``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TypeAlias


@dataclass(frozen=True)
class Base:
    """A base sort (type of individuals)."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Bool:
    """The type ``o`` of truth values."""

    def __str__(self) -> str:
        return "Bool"


@dataclass(frozen=True)
class Arrow:
    """Function type ``arg -> result``."""

    arg: Type
    result: Type

    def __str__(self) -> str:
        args, result = uncurry(self)
        return "(-> " + " ".join(str(a) for a in args) + f" {result})"


Type: TypeAlias = Base | Bool | Arrow

INT = Base("Int")
BOOL = Bool()


class TypeKind(Enum):
    """Classification of a type."""

    INDIVIDUAL = "individual"
    RELATIONAL = "relational"
    FIRST_ORDER_FUNCTION = "first-order-function"
    ILL_FORMED = "ill-formed"


def arrow(*types: Type) -> Type:
    """Build the right-associated arrow ``t1 -> t2 -> ... -> tn``."""
    if not types:
        raise ValueError("arrow() needs at least one type")
    result = types[-1]
    for arg in reversed(types[:-1]):
        result = Arrow(arg, result)
    return result


def uncurry(t: Type) -> tuple[list[Type], Type]:
    """Split ``t1 -> ... -> tn -> r`` (r not an arrow) into ``([t1..tn], r)``."""
    args: list[Type] = []
    while isinstance(t, Arrow):
        args.append(t.arg)
        t = t.result
    return args, t


def is_relational(t: Type) -> bool:
    """True iff ``t`` is ``o`` or ``tau -> rho`` with tau an argument type, rho relational."""
    if isinstance(t, Bool):
        return True
    if isinstance(t, Arrow):
        return is_argument(t.arg) and is_relational(t.result)
    return False


def is_argument(t: Type) -> bool:
    """True iff ``t`` is a base sort or a relational type."""
    return isinstance(t, Base) or is_relational(t)


def is_first_order(t: Type) -> bool:
    """True iff ``t`` is ``iota^n -> iota`` or ``iota^n -> o`` (n >= 0)."""
    args, result = uncurry(t)
    return all(isinstance(a, Base) for a in args) and isinstance(result, (Base, Bool))


def classify(t: Type) -> TypeKind:
    """Classify ``t``; total and deterministic.

    Relational wins over first-order for ``iota^n -> o``; a bare base sort is an
    individual type; ``iota^n -> iota`` (n >= 1) is a first-order function type.
    """
    if isinstance(t, Base):
        return TypeKind.INDIVIDUAL
    if is_relational(t):
        return TypeKind.RELATIONAL
    if is_first_order(t):
        return TypeKind.FIRST_ORDER_FUNCTION
    return TypeKind.ILL_FORMED


def order(t: Type) -> int:
    """Order of a type: base sorts and ``o`` have order 0."""
    if isinstance(t, Arrow):
        return max(order(t.arg) + 1, order(t.result))
    return 0
