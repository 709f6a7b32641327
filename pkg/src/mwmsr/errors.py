"""Exception types shared across the package."""


class DomainError(ValueError):
    """An operation was called outside its domain (bad node id, empty set, ...)."""


class ConfigError(ValueError):
    """A simulation or experiment configuration is invalid."""


class GraphFormatError(ValueError):
    """A graph file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NodeCountError(DomainError):
    """Exhaustive certification refused because the graph is too large."""


class ConsistencyError(AssertionError):
    """An implication that must always hold was violated (implementation bug)."""
