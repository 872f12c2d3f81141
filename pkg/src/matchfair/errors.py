"""Exceptions raised by matchfair.

Every exception derives from ``MatchfairError`` so callers (the CLI in
particular) can separate mathematical outcomes from tool failures.
Division by zero is not wrapped: exact arithmetic raises Python's own
``ZeroDivisionError``.
"""

from __future__ import annotations


class MatchfairError(Exception):
    """Base class for all matchfair errors."""


class DimensionError(MatchfairError, ValueError):
    """Vector or matrix dimensions do not agree."""


class CapExceededError(MatchfairError):
    """A documented size cap was exceeded.

    Raised instead of attempting an enumeration whose size would make the
    tool hang.
    """


class UnboundedError(MatchfairError):
    """A polyhedron expected to be bounded is not."""


class InfeasibleError(MatchfairError, ValueError):
    """Input data admits no feasible completion or allocation."""


class AllocationError(MatchfairError, ValueError):
    """An allocation is not a fractional perfect matching of its instance."""


class ParseError(MatchfairError, ValueError):
    """Malformed instance, allocation, certificate or rational.

    Parameters
    ----------
    msg
        Human-readable description of the problem.
    location
        Where the problem was found (file name, JSON path, row label), if
        known.
    """

    def __init__(self, msg: str, location: str | None = None) -> None:
        super().__init__(f"{location}: {msg}" if location else msg)
        self.location = location


class LpFailure(MatchfairError):
    """An LP that must have an optimum did not produce one."""


class ConfigError(MatchfairError, ValueError):
    """Invalid configuration (for example a bad environment variable)."""


class DeadlineExceeded(MatchfairError):
    """The wall-clock budget given with ``--max-seconds`` ran out."""
