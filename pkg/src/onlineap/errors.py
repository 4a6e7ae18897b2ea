"""Exception types shared across the package."""


class OnlineAPError(Exception):
    """Base class for all package errors."""


class ParseError(OnlineAPError, ValueError):
    """A token in an instance file could not be read as an integer."""

    def __init__(self, token, position):
        self.token = token
        self.position = position
        super().__init__(f"non-integer token {token!r} at token position {position}")


class MalformedInstanceError(OnlineAPError, ValueError):
    """Instance text does not contain exactly n*n cost entries."""

    def __init__(self, expected, found):
        self.expected = expected
        self.found = found
        super().__init__(f"malformed instance: expected {expected} cost entries, found {found}")


class DomainError(OnlineAPError, ValueError):
    """A weight violates the nonnegativity / completeness requirements."""


class InvalidMatchingError(OnlineAPError, ValueError):
    """A matching is not a permutation of the server indices."""


class SizeLimitError(OnlineAPError, ValueError):
    """Input too large for an exhaustive routine."""


class InfeasibleMagnitudeError(OnlineAPError, ValueError):
    """The per-cell perturbation cannot be kept inside the matrix bounds."""


class ProtocolViolation(OnlineAPError, RuntimeError):
    """An online algorithm looked at a request before it arrived."""

    def __init__(self, algorithm, step, column):
        self.algorithm = algorithm
        self.step = step
        self.column = column
        super().__init__(
            f"protocol violation: {algorithm} read column {column} at step {step} before its arrival"
        )


class DegenerateOptimumError(OnlineAPError, ArithmeticError):
    """The offline optimum is zero, so a competitive ratio is undefined."""
