"""Exception types shared across the package."""

from __future__ import annotations


class PreconditionError(ValueError):
    """An operation received input outside its documented domain."""


class UnsupportedInputError(ValueError):
    """A quadrature path received data it cannot represent (non-zonal support)."""


class ProfileError(ValueError):
    """A radial profile description is malformed or violates the decay requirement."""

    def __init__(self, message: str, *, field: str | None = None) -> None:
        super().__init__(message)
        self.field = field


class DiagnosticError(RuntimeError):
    """A numerical step failed in a way that points at an implementation bug."""
