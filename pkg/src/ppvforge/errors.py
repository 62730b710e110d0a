"""Exception hierarchy shared by every layer of the package."""


class PPVError(Exception):
    """Base class for all errors raised by this package."""


class DivisionByZeroError(PPVError, ZeroDivisionError):
    """Division by an exactly zero field element."""


class ZeroLeadingTermError(PPVError):
    """Series inversion requires a nonzero leading coefficient."""


class SingularLeadingMatrixError(PPVError):
    """Matrix series inversion requires an invertible t-leading matrix."""


class PoleOutsidePointSetError(PPVError):
    """A coefficient has a pole outside the allowed point set (infinity included)."""


class PrecisionExhaustedError(PPVError):
    """A computation asked for t-orders beyond the precision its inputs carry."""


class InsufficientPrecisionError(PPVError):
    """Not enough t-adic data to pose the reconstruction system."""


class NonInvertibleScalarError(PPVError):
    """A cocharacter or unit argument was exactly zero."""


class WrongPointCountError(PPVError, ValueError):
    """A construction that needs exactly 4m points received a different number."""


class InvalidPointsError(PPVError, ValueError):
    """Construction points must be distinct rationals."""


class FormatError(PPVError, ValueError):
    """Malformed, incomplete, or wrong-version serialized data."""
