"""Exception hierarchy shared by every module."""

import numpy as np


class TypicalityError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TypicalityError, ValueError):
    """An argument lies outside the domain of the operation."""


class IllPosedError(DomainError):
    """The estimation problem has no unique solution (e.g. n <= D)."""


class SingularCovarianceError(TypicalityError, np.linalg.LinAlgError):
    """Cholesky factorization failed.

    ``pivot`` is the 1-based index of the leading minor that is not
    positive definite, as reported by LAPACK ``potrf``.
    """

    def __init__(self, pivot, message=None):
        self.pivot = int(pivot)
        super().__init__(message or f"covariance is not positive definite (leading minor {self.pivot})")


class DataFormatError(TypicalityError):
    """Input table could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
