"""Exception types shared across the toolkit.

Undefined metrics (0/0 denominators) are NOT exceptions: operations return
``None`` for them, and callers decide how to render that (the CLI prints
"n/a"). Exceptions are reserved for contract violations.
"""


class ParameterError(ValueError):
    """An argument violates an operation's precondition."""


class ParseError(ValueError):
    """An input file is malformed. Carries file/line context when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}: "
            if line is not None:
                where = f"{path}:{line}: "
        super().__init__(f"{where}{message}")


class InvariantError(RuntimeError):
    """An internal invariant failed; indicates a bug, not bad input."""
