"""Exception hierarchy shared by every module of the package."""


class ChowLiftError(ValueError):
    """Base class for all errors raised by chowlift."""


class NotAUnit(ChowLiftError):
    pass


class NotSpecialLinear(ChowLiftError):
    pass


class NotUnimodular(ChowLiftError):
    pass


class NotApproxIdempotent(ChowLiftError):
    pass


class NoConvergence(ChowLiftError):
    pass


class InputsNotOrthogonal(ChowLiftError):
    pass


class NotAProjector(ChowLiftError):
    pass


class ModulusMismatch(ChowLiftError):
    pass


class NotGraded(ChowLiftError):
    pass


class NotSplit(ChowLiftError):
    """A projector image is not a free direct summand of the expected rank."""


class MissingSpanningSet(ChowLiftError):
    pass


class ShapeMismatch(ChowLiftError):
    """Per-prime data disagree on part counts or Tate shapes."""


class NotRational(ChowLiftError):
    pass


class NotInverseModP(ChowLiftError):
    pass


class TotalMismatch(ChowLiftError):
    pass


class InvalidInstance(ChowLiftError):
    pass


class RangeError(ChowLiftError):
    pass


class DocumentError(ChowLiftError):
    """Malformed workspace document; carries an optional source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
