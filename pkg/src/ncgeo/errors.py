"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input: wrong shape, non-skew matrix, bad parameter range."""


class IncompatibleAlgebraError(ValueError):
    """Two Weyl elements from different algebras were combined."""


class TruncationError(RuntimeError):
    """A truncated Fock-space computation lost more mass than allowed."""


class NumericalGateError(RuntimeError):
    """Two independent numerical routes disagree beyond their error bounds."""
