"""Type definitions for problem files."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from ..clauses import Clause, DefiniteClause, GoalClause
from ..syntax import Signature, Type

if TYPE_CHECKING:
    from ..services.structure_service import FiniteStructure


class TheoryKind(Enum):
    """Background theory named in the ``(theory ...)`` header."""

    LIA = "lia"
    EQDL = "eqdl"
    FINITE = "finite"


@dataclass(frozen=True)
class TheorySpec:
    """
    The ``(theory ...)`` header.

    ``constants`` are the uninterpreted Int constants (declared with
    ``declare-const`` for LIA, listed in the header for eqdl). ``structures``
    is the finite family of a ``finite`` theory, ``sort`` the name it gives
    to its carrier.
    """

    kind: TheoryKind
    constants: tuple[str, ...] = ()
    structures: tuple[FiniteStructure, ...] = ()
    sort: str = "Int"


@dataclass(frozen=True)
class ProblemFile:
    """A parsed problem: theory, declarations and clauses in source order."""

    theory: TheorySpec
    signature: Signature
    variables: Mapping[str, Type] = field(default_factory=dict)
    clauses: tuple[Clause, ...] = ()

    @property
    def rules(self) -> list[DefiniteClause]:
        return [c for c in self.clauses if isinstance(c, DefiniteClause)]

    @property
    def goals(self) -> list[GoalClause]:
        return [c for c in self.clauses if isinstance(c, GoalClause)]
