"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "HetmelError",
    "ParameterDomainError",
    "NumericsError",
    "ConvergenceError",
]


class HetmelError(Exception):
    """Base class for all package-specific failures."""


class ParameterDomainError(HetmelError, ValueError):
    """A parameter combination violates a stated validity condition."""


class NumericsError(HetmelError, RuntimeError):
    """A numerical procedure failed (step underflow, series cap, divergence).

    Carries a ``details`` dict so the CLI can emit structured diagnostics.
    """

    def __init__(self, message: str, **details: object) -> None:
        super().__init__(message)
        self.details = dict(details)


class ConvergenceError(NumericsError):
    """An iterative solver did not reach its tolerance."""
