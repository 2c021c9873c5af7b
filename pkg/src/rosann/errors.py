"""Shared error base.

Every domain error carries a stable machine ``code`` so the HTTP layer and the
CLI can map exceptions to exactly one diagnostic without inspecting messages.
"""

from __future__ import annotations


class RosannError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "ERROR"

    def __init__(self, message: str, *, field: str | None = None):
        super().__init__(message)
        self.field = field
