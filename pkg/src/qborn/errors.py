"""Exception types shared across the package.

The CLI maps these onto exit codes: :class:`DataError` -> 3,
:class:`DegenerateStateError` -> 4.
"""


class QbornError(Exception):
    """Base class for all package errors."""


class DimensionError(QbornError, ValueError):
    """Operands live in Hilbert spaces of different dimension."""


class NormalizationError(QbornError, ValueError):
    """A vector that must be unit-norm is not."""


class DegenerateStateError(QbornError, ArithmeticError):
    """A superposition or feature vector vanished numerically."""


class DataError(QbornError, ValueError):
    """Malformed input data or model file."""
