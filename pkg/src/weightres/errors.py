"""Exception hierarchy."""
from __future__ import annotations


class WeightresError(Exception):
    """Base class."""


class ContextError(WeightresError):
    """Variable-context mismatch or malformed exponent data."""


class DivisibilityError(WeightresError):
    """A term is not divisible by the requested monomial."""

    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class AdmissibilityError(DivisibilityError):
    """A transform failed because the ideal is not admissible for the center."""


class ParameterError(WeightresError):
    """A polynomial expected to be a regular parameter is not one."""


class BudgetError(WeightresError):
    """Jet truncation would exceed the configured cap."""


class ContactError(WeightresError):
    """No order-one element found where maximal contact was expected."""


class DropAssertionError(WeightresError):
    """A blowup failed to decrease the invariant; carries a reproducer."""

    def __init__(self, message, reproducer=None):
        super().__init__(message)
        self.reproducer = reproducer


class DepthExceeded(WeightresError):
    """The driver stopped at max_depth with unresolved leaves."""


class ParseError(WeightresError):
    def __init__(self, message, line=0, column=0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
