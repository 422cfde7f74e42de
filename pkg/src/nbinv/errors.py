"""Exception hierarchy shared by every module."""


class NBInvError(Exception):
    """Base class for all library errors."""


class AlgebraMismatch(NBInvError, ValueError):
    """Operands live in different algebras."""


class DimensionMismatch(AlgebraMismatch):
    pass


class BadDimension(NBInvError, ValueError):
    pass


class OddDimension(BadDimension):
    pass


class DegreeMismatch(AlgebraMismatch):
    pass


class GridMismatch(AlgebraMismatch):
    pass


class NotSupported(NBInvError):
    """The algebra instance does not provide the requested capability."""


class NoInvolution(NotSupported):
    pass


class NoEmbedding(NotSupported):
    pass


class NotInvertible(NBInvError, ArithmeticError):
    pass


class SingularToWorkingPrecision(NotInvertible):
    pass


class ZeroScalarPart(NotInvertible):
    """A unitized element with zero scalar part has no inverse in the unitization."""


class DiagonalNotInvertible(NotInvertible):
    def __init__(self, index: int, message: str = ""):
        self.index = index
        super().__init__(message or f"diagonal entry {index} is not invertible")


class NotConvergent(NBInvError, ArithmeticError):
    pass


class Overflow(NBInvError, OverflowError):
    pass


class InversionError(NBInvError):
    """Raised by the inversion engine when a method cannot certify an inverse."""


class NotInvertibleInAmbient(InversionError, NotInvertible):
    pass


class ApproximationStalled(InversionError):
    pass


class ResidualTooLarge(InversionError):
    pass


class MaskViolation(InversionError, ValueError):
    pass


class PivotNotUnit(InversionError, ValueError):
    pass


class NotTriangular(InversionError, ValueError):
    pass


class NotHermitian(InversionError, ValueError):
    pass


class NotSymmetricAlgebra(InversionError, NotSupported):
    pass


class ConfigInvalid(NBInvError, ValueError):
    pass


class ParseError(NBInvError, ValueError):
    pass
