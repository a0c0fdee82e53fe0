"""Exception hierarchy shared by every solver."""


class SecludedError(Exception):
    """Base class for all library errors."""


class InputError(SecludedError, ValueError):
    """Malformed arguments: unknown node ids, empty sets, bad parameters."""


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParameterError(InputError):
    """Generator or solver parameters outside their guards."""


class UnsupportedError(SecludedError):
    """The algorithm does not apply to this kind of graph."""


class InfeasibleError(SecludedError):
    """No path / tree connects the requested nodes."""


class BudgetError(SecludedError):
    """A size guard or search budget was exceeded.

    ``partial`` carries the best solution seen so far, when there is one.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
