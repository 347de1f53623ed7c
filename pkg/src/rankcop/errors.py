"""Exception hierarchy.

Data problems derive from :class:`DataError`, numerical failures from
:class:`NumericalError`. The CLI maps the two families onto distinct exit
codes.
"""

import numpy as np


class RankcopError(Exception):
    """Base class for all package errors."""


class DataError(RankcopError, ValueError):
    """Invalid, inconsistent or unparseable input data."""


class ParseError(DataError):
    """A CSV cell could not be interpreted."""

    def __init__(self, message, row=None, column=None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column!r}")
        if location:
            message = f"{', '.join(location)}: {message}"
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyCellError(DataError):
    """No synthetic rows match a conditioning pattern."""

    def __init__(self, message, count=0):
        super().__init__(f"{message} (matching rows: {count})")
        self.count = count


class NumericalError(RankcopError, ArithmeticError):
    """Base class for numerical failures inside the sampler or linear algebra."""


class NotPositiveDefiniteError(NumericalError, np.linalg.LinAlgError):
    """Cholesky factorization hit a pivot below tolerance."""


class SingularMatrixError(NotPositiveDefiniteError):
    """A correlation block could not be inverted."""


class DegenerateIntervalError(NumericalError):
    """A truncated-normal draw was requested on an interval with no usable mass."""

    def __init__(self, message, row=None, column=None):
        if row is not None or column is not None:
            message = f"{message} (row={row}, column={column})"
        super().__init__(message)
        self.row = row
        self.column = column


class SamplerError(NumericalError):
    """Numerical failure during a Gibbs scan; carries the scan index."""

    def __init__(self, message, scan=None):
        if scan is not None:
            message = f"scan {scan}: {message}"
        super().__init__(message)
        self.scan = scan
