"""Exception types shared across the package.

The CLI maps these onto exit codes: usage errors exit 2 (click),
DataError and its subclasses exit 3, NumericError exits 4.
"""


class CnnfdError(Exception):
    """Base class for package errors."""


class ShapeMismatchError(CnnfdError, ValueError):
    """A tensor dimension does not match the declared contract.

    `axis` names the offending dimension so callers can report it.
    """

    def __init__(self, message, axis=None):
        super().__init__(message)
        self.axis = axis


class NumericError(CnnfdError, ArithmeticError):
    """A numeric invariant was violated (NaN/Inf, non-physical state)."""


class DataError(CnnfdError, ValueError):
    """Bad on-disk data: unknown schema, shape mismatch, missing file."""


class IntegrityError(DataError):
    """Checksum mismatch for a stored blob."""

    def __init__(self, message, filename=None):
        super().__init__(message)
        self.filename = filename


class ConfigError(CnnfdError, ValueError):
    """Invalid configuration (architecture, training, oracle spec)."""


class OutOfEnvelopeError(NumericError):
    """An input lies outside the supported manufacturing envelope."""

    def __init__(self, field, row, value, lo, hi):
        super().__init__(
            f"{field}[{row}] = {value:g} outside the supported envelope "
            f"[{lo}, {hi}] x design")
        self.field = field
        self.row = row
        self.value = value
