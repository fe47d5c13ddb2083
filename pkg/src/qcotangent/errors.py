"""Exception hierarchy shared by every tier of the engine."""


class QCotangentError(Exception):
    """Base class for all errors raised by this package."""


class NotAUnit(QCotangentError, ArithmeticError):
    pass


class BudgetExceeded(QCotangentError, RuntimeError):
    pass


class NotOrientable(QCotangentError, ValueError):
    def __init__(self, message, relation=None):
        super().__init__(message)
        self.relation = relation


class CompletionDiverged(QCotangentError, RuntimeError):
    pass


class BadDimension(QCotangentError, ValueError):
    pass


class SingularMatrix(QCotangentError, ArithmeticError):
    pass


class NoQuadraticRelation(QCotangentError, ValueError):
    pass


class NotInvertible(QCotangentError, ValueError):
    pass


class NoImage(QCotangentError, KeyError):
    """A generator whose star image only exists at the matrix tier."""

    def __init__(self, generator, hint=None):
        msg = f"no scalar-tier star image for {generator}"
        if hint:
            msg += f" ({hint})"
        super().__init__(msg)
        self.generator = generator
        self.hint = hint

    def __str__(self):
        return self.args[0]


class NotProved(QCotangentError, RuntimeError):
    """Bounded search exhausted; this is not a refutation."""

    def __init__(self, depth, explored=0):
        super().__init__(f"no proof found within depth {depth} ({explored} states explored)")
        self.depth = depth
        self.explored = explored


class ExprSyntaxError(QCotangentError, SyntaxError):
    def __init__(self, message, text="", pos=0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


class UnknownGenerator(QCotangentError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else "unknown generator"
