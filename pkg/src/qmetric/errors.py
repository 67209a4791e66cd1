"""Exception types shared across the package."""


class QmetricError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(QmetricError):
    """Operands have incompatible shapes."""


class NotHermitian(QmetricError):
    """Matrix fails the Hermiticity tolerance."""


class ParityMismatch(QmetricError):
    """Grading data inconsistent with the declared parity."""


class UnsupportedKind(QmetricError):
    """Operation not available for this seminorm kind."""


class SolverDidNotConverge(QmetricError):
    """Solver stopped without meeting its convergence target.

    The partial value carried by the report is still a valid bound of the
    advertised kind.
    """


class HypothesisFailed(QmetricError):
    """A certified check found a violating witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidWeight(QmetricError):
    """Averaging weight is negative or not normalized."""


class IrrationalTheta(QmetricError):
    """Torus angle must be rational p/q."""


class EmptySpace(QmetricError):
    """Metric space has no points."""


class ConfigInvalid(QmetricError):
    """Experiment configuration failed validation."""
