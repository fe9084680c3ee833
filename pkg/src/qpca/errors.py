"""Exception hierarchy shared by every module."""


class QPCAError(Exception):
    """Base class for all library errors."""


class NotHermitian(QPCAError, ValueError):
    pass


class NotUnitary(QPCAError, ValueError):
    pass


class NotDensityMatrix(QPCAError, ValueError):
    pass


class PhaseWrapRisk(QPCAError, ValueError):
    pass


class DimensionMismatch(QPCAError, ValueError):
    pass


class EmptyCombination(QPCAError, ValueError):
    pass


class InvalidScale(QPCAError, ValueError):
    pass


class BadRegisterSplit(QPCAError, ValueError):
    pass


class InvalidAccuracy(QPCAError, ValueError):
    pass


class InvalidParameters(QPCAError, ValueError):
    pass


class SupNormViolation(QPCAError, ValueError):
    pass


class NotHermitianTarget(QPCAError, ValueError):
    pass


class PhaseOutOfRange(QPCAError, ValueError):
    pass


class ZeroVector(QPCAError, ValueError):
    pass


class ZeroMatrixPower(QPCAError, ArithmeticError):
    pass


class InvalidEigenvalue(QPCAError, ValueError):
    pass


class NotUnitNorm(QPCAError, ValueError):
    pass


class RankDeficient(QPCAError, ValueError):
    pass


class GapTooSmall(QPCAError, RuntimeError):
    """The spectral gap is too small for the power method to resolve.

    ``partial`` holds whatever components were found before the failure.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DatasetError(QPCAError, ValueError):
    pass


class ParseError(DatasetError):
    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyDataset(DatasetError):
    pass


class NegativeWeight(DatasetError):
    pass


class WeightSumZero(DatasetError):
    pass
