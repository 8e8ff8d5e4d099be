"""Exception hierarchy shared by all infogeo modules."""


class InfoGeoError(Exception):
    """Base class for every error raised by this package."""


class DomainError(InfoGeoError):
    """A coordinate point lies outside the open parameter domain."""


class UnsupportedFamily(InfoGeoError):
    """The requested operation has no implementation for this family."""


class DimensionMismatch(InfoGeoError):
    """Operands live in spaces of different dimension."""


class NumericalError(InfoGeoError):
    """A linear-algebra routine failed its residual or validity check."""


class ConditioningError(InfoGeoError):
    """Finite-difference results disagree beyond what truncation theory allows."""


class NoisePanic(InfoGeoError):
    """Rounding noise dominates an extracted tensor; increase the step size."""


class OrthogonalLink(InfoGeoError):
    """Two consecutive loop states are (numerically) orthogonal."""


class RejectionOverflow(InfoGeoError):
    """Too many Monte-Carlo draws violated a sampling constraint."""


class UsageError(InfoGeoError):
    """The caller combined arguments in an unsupported way."""
