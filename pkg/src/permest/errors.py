"""Exception hierarchy.

Every error carries the name of the failing check in its message. The
``exit_code`` class attribute is what the command-line front end returns.
"""


class PermestError(Exception):
    exit_code = 1


class InvalidInput(PermestError, ValueError):
    """Bad matrix, bad parameter or malformed file."""

    exit_code = 2


class NotSquare(InvalidInput):
    pass


class NotHermitian(InvalidInput):
    pass


class NotPositiveSemidefinite(InvalidInput):
    pass


class NonFiniteEntry(InvalidInput):
    pass


class NegativeSpectrumEntry(InvalidInput):
    pass


class DimensionTooLarge(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class InvalidC(InvalidInput):
    pass


class ZeroMatrix(InvalidInput):
    pass


class ZeroEigenvalue(InvalidInput):
    pass


class ParseError(InvalidInput):
    pass


class RegimeNotSatisfied(PermestError):
    """The spectral condition required by the requested error mode fails."""

    exit_code = 3


class NumericalFailure(PermestError, ArithmeticError):
    exit_code = 4


class ConvergenceFailure(NumericalFailure):
    pass


class SampleOverflow(NumericalFailure):
    """Planned sample count exceeds the configured cap."""
