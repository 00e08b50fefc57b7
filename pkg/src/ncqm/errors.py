"""Exception and warning types raised by ncqm."""


class NCQMError(Exception):
    """Base class for all ncqm errors."""


class DomainError(NCQMError, ValueError):
    """An input lies outside the region where the truncated representation is valid."""


class DimensionMismatch(NCQMError, ValueError):
    """Operands live on Fock truncations of different size."""


class DegenerateModel(NCQMError, ValueError):
    """The requested model has no discrete spectrum (e.g. both frequencies zero)."""


class StepSizeError(NCQMError, RuntimeError):
    """The classical integrator lost energy conservation at the chosen step."""


class QuadratureWarning(UserWarning):
    """The estimated quadrature error exceeds the requested tolerance."""


class SeriesTruncationWarning(UserWarning):
    """A truncated series still carries non-negligible terms."""
