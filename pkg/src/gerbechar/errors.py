"""Exception hierarchy shared by all modules.

Every error that corresponds to a CLI exit code carries a ``witness`` dict
with enough data to reproduce the failure (indices of the violating tuple,
residual magnitudes, and so on).
"""

from __future__ import annotations


class GerbeError(Exception):
    """Base class; carries an optional witness payload."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


class ValidationError(GerbeError):
    """An object violates one of its defining axioms (CLI exit 1)."""


class StructuralError(GerbeError):
    """Malformed input: bad shapes, unreadable files, mismatched operands (CLI exit 2)."""


class ResourceError(GerbeError):
    """A documented size guard was exceeded (CLI exit 3)."""
