"""Exception hierarchy shared by the optimization core."""

from __future__ import annotations

from typing import Optional


class MixedSegoError(RuntimeError):
    """Base class for library failures."""


class DomainError(MixedSegoError, ValueError):
    """Raised when an argument lies outside its mathematical domain."""


class DegenerateDataError(MixedSegoError):
    """Raised when training data carries no usable information."""


class IllConditionedError(MixedSegoError):
    """Raised when a correlation matrix cannot be factorized."""

    def __init__(self, message: str, fold: Optional[int] = None) -> None:
        super().__init__(message)
        self.fold = fold


class EvaluationError(MixedSegoError):
    """Raised when a black-box evaluation fails."""


class StudyConfigError(MixedSegoError):
    """Raised for invalid study definitions."""
