"""Registry for first-order emit format handlers."""

from __future__ import annotations

from typing import TYPE_CHECKING

from .native_format import NativeFormatHandler
from .smtlib_format import SmtLibFormatHandler

if TYPE_CHECKING:
    from .base import EmitFormatHandler


class FormatRegistry:
    """Registry to manage available emit format handlers."""

    def __init__(self) -> None:
        self._handlers: dict[str, EmitFormatHandler] = {}
        self._register_default_handlers()

    def _register_default_handlers(self) -> None:
        self.register(NativeFormatHandler())
        self.register(SmtLibFormatHandler())

    def register(self, handler: EmitFormatHandler) -> None:
        """
        Register a format handler.

        Args:
            handler: The format handler instance to register
        """
        self._handlers[handler.format_id] = handler

    def get_handler(self, format_id: str) -> EmitFormatHandler | None:
        """
        Get a format handler by its ID.

        Args:
            format_id: The unique identifier of the format

        Returns:
            The format handler instance, or None if not found
        """
        return self._handlers.get(format_id)

    def get_all_handlers(self) -> dict[str, EmitFormatHandler]:
        return self._handlers.copy()

    def get_format_ids(self) -> list[str]:
        """Format IDs in registration order, for ``--format`` choices."""
        return list(self._handlers)


# Global registry instance
format_registry = FormatRegistry()
