"""Emitter for the native S-expression first-order format."""

from __future__ import annotations

from typing import TYPE_CHECKING

from ..syntax import show
from .base import EmitFormatHandler

if TYPE_CHECKING:
    from .translation_service import FOHornClause, Translation


class NativeFormatHandler(EmitFormatHandler):
    """Handler for the problem-file surface syntax extended with ``sort``, ``fun`` and ``clause`` forms."""

    @property
    def format_name(self) -> str:
        return "Native"

    @property
    def format_id(self) -> str:
        return "native"

    @property
    def file_extension(self) -> str:
        return ".fohc"

    def emit(self, translation: Translation) -> str:
        lines = [f"(sort {sort})" for sort in translation.sorts]
        for name, args, result in self.declared_functions(translation):
            lines.append(f"(fun {name} ({' '.join(str(a) for a in args)}) {result})")
        lines.extend(self.clause(c) for c in translation.clauses)
        return "\n".join(lines) + "\n"

    @staticmethod
    def clause(c: FOHornClause) -> str:
        binders = " ".join(f"({v.name} {v.type})" for v in c.variables)
        head = show(c.positive) if c.positive is not None else "false"
        if not c.negative:
            return f"(clause ({binders}) {head})"
        body = " ".join(show(a) for a in c.negative)
        return f"(clause ({binders}) (=> (and {body}) {head}))"
