"""Exception hierarchy shared by every module of the package."""


class BCLError(Exception):
    """Base class for all errors raised by :mod:`bcltriples`."""


# matrix kernel
class NonSquare(BCLError):
    pass


class NotHermitian(BCLError):
    pass


class MalformedMatrix(BCLError):
    pass


class DimensionMismatch(BCLError):
    pass


class NotUnitary(BCLError):
    pass


class NotProjection(BCLError):
    pass


# spectra
class PairingViolation(BCLError):
    """An eigenvalue in (0, 1) has a partner -lambda of different multiplicity."""


class KernelNotEmpty(BCLError):
    pass


class NotContraction(BCLError):
    pass


class InfiniteSpectrum(BCLError):
    pass


class MalformedSpectrum(BCLError):
    pass


# constructions
class CommutationFailure(BCLError):
    pass


class LambdaOutOfRange(BCLError):
    pass


class PreconditionViolation(BCLError):
    pass


class InvalidTwist(BCLError):
    pass


# lazy operators
class NotBijection(BCLError):
    pass


class IndexOutOfRule(BCLError):
    pass


# verification
class IterationLimit(BCLError):
    """Raised when an orbit closure does not stabilise.

    The partially closed subspace is attached as ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NotShiftType(BCLError):
    pass
