"""Exception hierarchy shared by the whole toolbox."""

from __future__ import annotations


class HochcError(Exception):
    """Base exception for all hochc errors."""


class SignatureError(HochcError):
    """Raised when a signature violates its well-formedness conditions."""


class UnboundNameError(HochcError):
    """Raised when a term mentions a symbol that is neither declared nor logical."""

    def __init__(self, name: str) -> None:
        super().__init__(f"unbound name: {name}")
        self.name = name


class TypingError(HochcError):
    """Raised when a term violates a typing rule."""

    def __init__(self, location: str, expected: str, found: str) -> None:
        super().__init__(f"ill-typed term at {location}: expected {expected}, found {found}")
        self.location = location
        self.expected = expected
        self.found = found
