"""Exception types shared across the package."""

from __future__ import annotations


class GammaLabError(Exception):
    """Base class for every package-specific error."""


class PoleError(GammaLabError, ValueError):
    """An evaluation landed exactly on a pole of the gamma function."""

    def __init__(self, pole: int, message: str | None = None):
        self.pole = pole
        super().__init__(message or f"argument is the gamma pole at {pole}")


class DomainError(GammaLabError, ValueError):
    """Argument lies outside the contract of the operation."""


class PrecisionLossError(GammaLabError, ArithmeticError):
    """Cancellation or conditioning exhausted the working precision."""


class OrderUndefinedError(GammaLabError, ArithmeticError):
    """Convergence order is undefined because a sample error is exactly zero,
    i.e. the limit was already attained at working precision."""
