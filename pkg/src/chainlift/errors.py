"""Exception types shared across the package."""

from __future__ import annotations


class ChainliftError(ValueError):
    """Base class for all domain errors raised by this package."""


class ParseError(ChainliftError):
    """Malformed point-cloud input; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DisconnectedGraphError(ChainliftError):
    """Raised when an operation needs a connected scale graph.

    Callers should restrict to a chain component of the graph.
    """


class ChainValidationError(ChainliftError):
    """A point sequence fails the chain condition at some step.

    ``index`` is the position of the first offending step and ``pair``
    the offending point pair.
    """

    def __init__(self, message: str, index: int, pair: tuple[int, int]):
        self.index = index
        self.pair = pair
        super().__init__(f"{message}: pair {pair} at step {index}")


class CatalogBoundError(ChainliftError):
    """Requested group order exceeds the catalog bound."""
