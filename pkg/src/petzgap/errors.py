"""Exception taxonomy shared across the package."""


class PetzGapError(Exception):
    """Base class for all package errors."""


class InvalidInput(PetzGapError):
    """Caller handed in something structurally wrong (shape, range, symmetry)."""


class NotPSD(InvalidInput):
    """Matrix has an eigenvalue below the PSD tolerance."""


class NotNormalized(InvalidInput):
    """Trace too far from 1 to renormalize silently."""


class SpecInconsistent(InvalidInput):
    """Subalgebra description fails a structural check; message names the property."""


class DomainError(PetzGapError):
    """Mathematically undefined request (function evaluated off its domain, etc.)."""


class NotRegular(DomainError):
    """Monotone function lacks the regularity data a bound needs."""


class NumericalFailure(PetzGapError):
    """Computation ran but the result cannot be trusted to tolerance."""


class Unsupported(PetzGapError):
    """Valid mathematics the implementation deliberately does not cover."""
