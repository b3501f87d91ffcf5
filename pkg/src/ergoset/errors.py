"""Exception types shared across the package."""

from __future__ import annotations


class ErgosetError(Exception):
    """Base class for all library errors."""


class ParseError(ErgosetError):
    """Malformed edge-list input. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContractViolation(ErgosetError):
    """An operation was called with arguments that break its precondition."""


class NumericalError(ErgosetError):
    """A numerical routine failed (singular system, SVD breakdown, ...)."""


class NonConvergenceError(NumericalError):
    """Iterative absorption did not reach the requested residual mass."""

    def __init__(self, message: str, residual: float, steps: int):
        self.residual = residual
        self.steps = steps
        super().__init__(message)


class StatisticsError(ErgosetError):
    """Statistical routine called on degenerate samples."""
