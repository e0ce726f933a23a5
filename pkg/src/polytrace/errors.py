"""Exception types shared across the package."""


class PolytraceError(Exception):
    """Base class for all library errors."""


class ParseError(PolytraceError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")


class DimensionMismatch(PolytraceError):
    pass


class DivisionByZero(PolytraceError):
    """A negative exponent was evaluated at a zero coordinate."""


class SingularMatrix(PolytraceError):
    pass


class SingularLattice(PolytraceError):
    pass


class NotSquare(PolytraceError):
    pass


class LaurentUnsupported(PolytraceError):
    pass


class NonGenericLifting(PolytraceError):
    pass


class GenericityExhausted(PolytraceError):
    pass


class PathFailure(PolytraceError):
    pass


class Inconclusive(PolytraceError):
    pass


class DegenerateConfiguration(PolytraceError):
    pass


class Disconnected(PolytraceError):
    pass


class StalledBeforeCount(PolytraceError):
    """Monodromy stopped finding solutions before reaching the expected count."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result
