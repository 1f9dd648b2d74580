"""Base class for first-order clause emitters."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

from ..syntax import LIA_FUNCTIONS, LIA_RELATIONS, Type, is_numeral, uncurry

if TYPE_CHECKING:
    from .translation_service import Translation

BUILTIN_SYMBOLS = frozenset({*LIA_FUNCTIONS, *LIA_RELATIONS})


class EmitFormatHandler(ABC):
    """Abstract base class for first-order Horn clause output formats."""

    @property
    @abstractmethod
    def format_name(self) -> str:
        """Human-readable name of the format (e.g., 'SMT-LIB 2')."""
        pass

    @property
    @abstractmethod
    def format_id(self) -> str:
        """Unique identifier for the format, as accepted by ``--format``."""
        pass

    @property
    @abstractmethod
    def file_extension(self) -> str:
        """File extension for this format (e.g., '.smt2')."""
        pass

    @abstractmethod
    def emit(self, translation: Translation) -> str:
        """
        Render a translated clause set.

        Args:
            translation: Output of ``translate``

        Returns:
            The complete file contents, ending with a newline
        """
        pass

    @staticmethod
    def declared_functions(translation: Translation) -> list[tuple[str, list[Type], Type]]:
        """Non-builtin function symbols as ``(name, argument sorts, result sort)`` in declaration order."""
        declarations = []
        for name, ty in translation.signature.background.items():
            if name in BUILTIN_SYMBOLS or is_numeral(name):
                continue
            args, result = uncurry(ty)
            declarations.append((name, args, result))
        return declarations
