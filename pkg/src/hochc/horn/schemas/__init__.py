"""Problem-file data types and clause validation."""

from .types import ProblemFile, TheoryKind, TheorySpec
from .validators import Diagnostic, validate, validate_all

__all__ = [
    # Type definitions
    "ProblemFile",
    "TheoryKind",
    "TheorySpec",
    # Validation
    "Diagnostic",
    "validate",
    "validate_all",
]
