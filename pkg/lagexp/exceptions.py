"""
Exceptions raised by lagexp.

Everything derives from :class:`LagexpError`. The numerical conditions that the
command line reports with exit code 3 derive from :class:`NumericalDiagnostic`.
"""


class LagexpError(Exception):
    """Base class for every lagexp error"""


class InvalidArgumentError(LagexpError, ValueError):
    """An argument is outside the range the operation accepts"""


class DomainError(LagexpError, ValueError):
    """A function was evaluated outside its admissible domain"""


class NumericalDiagnostic(LagexpError):
    """Base class for conditions detected while computing, not while validating"""


class BoundaryProximityError(NumericalDiagnostic):
    """Finite difference stencil reaches the boundary x_j = 0 of the orthant"""


class QuadratureOverflowError(NumericalDiagnostic):
    """The lifted integrand is not representable at some quadrature node"""


class DivergenceError(NumericalDiagnostic):
    """A series is not summable at the available truncation"""


class ParityError(NumericalDiagnostic):
    """An even Hermite array carries a non-zero odd-index entry"""


class DegenerateFitError(NumericalDiagnostic):
    """Not enough usable tail coefficients to fit a decay model"""
