"""ppvforge: exact construction of parameterized differential equations.

Builds, entirely in exact arithmetic, a linear differential system in x whose
coefficients are truncated power series in a deformation parameter t, so that
the local solution data at a chosen set of points realizes a prescribed split
semisimple matrix group. Every algebraic identity the construction relies on
is checked at the working t-adic precision.
"""

from .errors import (
    DivisionByZeroError,
    FormatError,
    InsufficientPrecisionError,
    InvalidPointsError,
    NonInvertibleScalarError,
    PoleOutsidePointSetError,
    PPVError,
    PrecisionExhaustedError,
    SingularLeadingMatrixError,
    WrongPointCountError,
    ZeroLeadingTermError,
)
from .rational import Poly, RatFunc, partial_fractions, poly_gcd, rat, rat_str
from .series import INF, TMatrix, TSeries, shifted_pole_series

__version__ = "0.1.0"

__all__ = [
    "DivisionByZeroError",
    "FormatError",
    "INF",
    "InsufficientPrecisionError",
    "InvalidPointsError",
    "NonInvertibleScalarError",
    "Poly",
    "PoleOutsidePointSetError",
    "PPVError",
    "PrecisionExhaustedError",
    "RatFunc",
    "SingularLeadingMatrixError",
    "TMatrix",
    "TSeries",
    "WrongPointCountError",
    "ZeroLeadingTermError",
    "partial_fractions",
    "poly_gcd",
    "rat",
    "rat_str",
    "shifted_pole_series",
    "__version__",
]
