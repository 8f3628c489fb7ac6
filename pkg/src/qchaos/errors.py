"""Exception hierarchy shared by all qchaos modules."""


class QChaosError(Exception):
    """Base class for library errors."""


class InvalidParameterError(QChaosError, ValueError):
    """Parameters violate a documented precondition."""


class CapacityError(QChaosError):
    """Requested system exceeds the configured size cap."""


class StructureError(QChaosError):
    """A matrix does not have the coupling structure an operation relies on."""


class SolverError(QChaosError):
    """The eigensolver failed to converge or produced an inaccurate result."""


class DegenerateSpectrumError(QChaosError):
    """All levels in the analysed window coincide."""


class InsufficientSampleError(QChaosError):
    """Too few levels or spacings for the requested statistic."""


class NoCrossingError(QChaosError):
    """A scanned curve never crosses the requested threshold."""


class DataIntegrityError(QChaosError):
    """A probability row is not normalized."""


class FitError(QChaosError):
    """A least-squares fit failed or was rejected.

    The binned data are attached as ``self.data`` when available.
    """

    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = data


class NoDecayError(QChaosError):
    """Survival probability never drops below the extraction threshold."""


class TruncationError(QChaosError):
    """Probability leaked onto the edges of a truncated basis."""


class NumericFailure(QChaosError):
    """Norm drift or another numerical invariant was violated."""


class PartialSweepError(QChaosError):
    """Too many grid points of a sweep failed."""
