"""Exception types shared across the package."""

from __future__ import annotations


class RingSpecError(ValueError):
    """Malformed or invalid ring description.

    ``position`` is the character offset of the failure when it comes from
    the text parser, otherwise ``None``.
    """

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class GuardError(RuntimeError):
    """A computation would exceed a configured size guard."""


class ExtremalRingError(ValueError):
    """An operation that needs a non-extremal ring was given an extremal one."""


class InvariantError(AssertionError):
    """An internal consistency check failed."""
