"""Exception hierarchy shared by the library and the command-line runner."""


class CubesegError(Exception):
    """Base class for all errors raised by cubeseg."""


class InvalidInputError(CubesegError, ValueError):
    """Malformed data: empty images, mismatched lengths, out-of-range indices."""


class ConfigurationError(CubesegError, ValueError):
    """A configuration value is outside its allowed domain."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class BudgetExceededError(CubesegError, RuntimeError):
    """Exhaustive enumeration would exceed the allowed number of assignments."""


class ConsistencyError(CubesegError, RuntimeError):
    """Internal invariant violated (e.g. a pixel maps to an unoccupied subcube)."""
