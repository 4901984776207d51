"""Exception types shared across the package."""

from __future__ import annotations


class DimensionError(ValueError):
    """Raised when a point, direction or dataset has the wrong dimension."""


class ParameterError(ValueError):
    """Raised when a copula parameter lies outside its admissible range."""


class QuadratureError(RuntimeError):
    """The adaptive quadrature ran out of panels before reaching tolerance.

    The best available estimate is kept on the exception so callers can
    decide whether it is good enough.
    """

    def __init__(self, message: str, value: float, error_estimate: float):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class DataError(ValueError):
    """Raised for malformed input data (unparsable CSV cells, bad shapes)."""


class TieError(DataError):
    """Raised under the strict tie policy when a column contains ties."""

    def __init__(self, column: int, rows: tuple[int, ...]):
        self.column = column
        self.rows = rows
        shown = ", ".join(str(r) for r in rows[:10])
        more = "" if len(rows) <= 10 else f" (+{len(rows) - 10} more)"
        super().__init__(f"tied values in column {column} at rows {shown}{more}")
