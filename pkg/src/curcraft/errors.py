"""Exception taxonomy.

Two families matter to callers: ``PreconditionError`` (bad input the user can
fix) and ``NumericFailure`` (the instance violates an assumption the
algorithms rely on, e.g. a vanishing pivot). The CLI maps them to exit
codes 2 and 3.
"""


class CurcraftError(Exception):
    """Base class for all library errors."""


class PreconditionError(CurcraftError, ValueError):
    pass


class NumericFailure(CurcraftError, ArithmeticError):
    pass


# polynomials
class DegreeExceedsFlipOrder(PreconditionError):
    pass


class DegreeMismatch(PreconditionError):
    pass


class PrecondViolated(PreconditionError):
    pass


class NotRealRooted(NumericFailure):
    pass


class DegenerateChain(NumericFailure):
    pass


class ZeroPolynomialRoot(NumericFailure):
    """Root query on the zero polynomial."""


# densela
class IndexOutOfRange(PreconditionError, IndexError):
    pass


class NotSymmetric(PreconditionError):
    pass


class SingularCore(NumericFailure):
    pass


class ZeroPivot(NumericFailure):
    pass


# cur_polynomials / selection
class RankTooSmall(PreconditionError):
    pass


class RankDeficientC(PreconditionError):
    pass


class ShapeMismatch(PreconditionError):
    pass


class EnumerationCapExceeded(PreconditionError):
    pass


class AllPivotsZero(NumericFailure):
    pass


class NoFullDegreeChild(NumericFailure):
    pass


class NoInvertiblePair(NumericFailure):
    pass


class ResidualMismatch(NumericFailure):
    """Reported residual disagrees with its independent recomputation."""


# cli / matrix io
class ParseError(PreconditionError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class RaggedRows(ParseError):
    pass


class NonFiniteEntry(ParseError):
    pass


class UnknownKind(PreconditionError):
    pass


class BadParams(PreconditionError):
    pass


class ConfigError(PreconditionError):
    pass
