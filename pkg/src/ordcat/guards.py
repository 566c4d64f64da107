"""Size guards for enumeration-heavy operations.

Everything in this package works by exhaustive enumeration, so every
operation whose search space can blow up checks its candidate count
against a configurable bound first.  The bound is read from the
ORDCAT_SIZE_GUARD environment variable (default 10**7).
"""

import os

DEFAULT_GUARD = 10**7


class SizeGuardError(Exception):
    """Raised when a search space exceeds the configured bound."""

    def __init__(self, what, size, limit):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"too large: {what} has search space {size} > bound {limit}")


class StructuralError(Exception):
    """Raised on malformed input to a constructor that cannot proceed."""


def guard_limit(guard=None):
    if guard is not None:
        return guard
    raw = os.environ.get("ORDCAT_SIZE_GUARD", "")
    try:
        return int(raw)
    except ValueError:
        return DEFAULT_GUARD


def check_guard(what, size, guard=None):
    limit = guard_limit(guard)
    if size > limit:
        raise SizeGuardError(what, size, limit)
