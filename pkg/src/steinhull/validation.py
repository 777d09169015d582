"""Input validation shared across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


def require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)
