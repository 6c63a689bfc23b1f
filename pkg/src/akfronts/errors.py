"""Exception hierarchy shared by every module."""


class AkError(Exception):
    """Base class for all errors raised by akfronts."""


class ParseError(AkError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(message + where)


class DimensionMismatch(ParseError):
    pass


class UnknownIdentifier(ParseError):
    pass


class NumericFailure(AkError):
    """A computation could not be carried out numerically."""


class DomainError(NumericFailure, ArithmeticError):
    def __init__(self, message, pos=None):
        self.pos = pos
        where = f" at line {pos[0]}, column {pos[1]}" if pos else ""
        super().__init__(message + where)


class OrderExhausted(NumericFailure):
    """More derivatives were requested than the jet order supports."""


class CorankTooHigh(NumericFailure):
    """The kernel of df has dimension >= 2, so the criteria do not apply."""


class NotCoorientable(AkError):
    pass


class DegenerateCrossing(NumericFailure):
    pass
