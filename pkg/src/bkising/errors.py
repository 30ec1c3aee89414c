"""Exception types shared across the package."""

from __future__ import annotations


class BkIsingError(Exception):
    """Base class for all package errors."""


class PreconditionError(BkIsingError):
    """A named precondition was violated (parity, cap, domain, ...).

    The ``name`` is a stable machine-readable identifier; CLI error envelopes
    and structured reports carry it verbatim.
    """

    def __init__(self, name: str, message: str) -> None:
        super().__init__(message)
        self.name = name
        self.message = message
