"""Exception hierarchy.

``InputError`` subclasses map to CLI exit code 1, ``SolverError`` subclasses
to exit code 2.
"""


class MagnitudeError(Exception):
    @property
    def code(self) -> str:
        return type(self).__name__


class InputError(MagnitudeError, ValueError):
    pass


class SolverError(MagnitudeError, ArithmeticError):
    pass


class EmptyInput(InputError):
    pass


class NonFiniteCoordinate(InputError):
    pass


class DuplicatePoints(InputError):
    """Two distinct points sit at distance zero, so the similarity matrix is singular."""


class DuplicatePoint(InputError):
    pass


class NotSquare(InputError):
    pass


class AsymmetryExceedsTolerance(InputError):
    pass


class NegativeDistance(InputError):
    pass


class NonzeroDiagonal(InputError):
    pass


class NonPositiveScale(InputError):
    pass


class NonPositiveDistance(InputError):
    pass


class UnsortedInput(InputError):
    pass


class DuplicateValues(InputError):
    pass


class InsufficientWindow(InputError):
    pass


class TriangleViolation(InputError):
    pass


class TooLarge(InputError):
    pass


class UnknownPoint(InputError, KeyError):
    pass


class NotPositiveDefinite(SolverError):
    """Cholesky failed even after jitter: degenerate geometry or a non-PD pseudometric."""


class Diverged(SolverError):
    pass


class NonFiniteUpdate(SolverError):
    pass
