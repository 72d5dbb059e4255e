"""Exception hierarchy shared by all negpanel modules.

Every error raised by the package derives from :class:`NegPanelError`.
``exit_code`` drives the CLI exit status: 1 for validation problems,
2 for numerical failures.
"""

from __future__ import annotations

__all__ = [
    "NegPanelError",
    "InvalidEconomyError",
    "NonPositiveWageError",
    "NonPositiveInputError",
    "DegenerateLaborError",
    "NoConvergenceError",
    "DesignError",
    "RankDeficientError",
    "AllWithinVariationZeroError",
    "NameMismatchError",
    "NoConsecutivePairsError",
    "MissingColumnError",
    "NonPositiveValueError",
    "ZeroDenominatorError",
    "LeaderMissingError",
    "WeightMismatchError",
    "NonPositiveWeightError",
    "IncompleteCellError",
    "EmptySampleError",
    "DatasetError",
    "SchemaMismatchError",
    "CsvParseError",
    "DuplicateKeyError",
    "BadCoefficientNamesError",
    "SpecMismatchError",
]


class NegPanelError(Exception):
    """Base class for all package errors."""

    exit_code = 1


# --- spatial-economy model ------------------------------------------------


class InvalidEconomyError(NegPanelError):
    """The economy violates a structural constraint (shapes, signs, transport)."""


class NonPositiveWageError(NegPanelError):
    """A wage vector contains a zero or negative entry."""


class NonPositiveInputError(NegPanelError):
    """A quantity that must be strictly positive is not."""


class DegenerateLaborError(NegPanelError):
    """The cost-of-living aggregate vanished (no labor anywhere)."""


class NoConvergenceError(NegPanelError):
    """The fixed-point solver hit its iteration cap."""

    exit_code = 2

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(residual {residual:.3e})"
        )


# --- panel estimation -----------------------------------------------------


class DesignError(NegPanelError):
    """A design matrix violates its invariants."""


class RankDeficientError(NegPanelError):
    """The regressor matrix is rank deficient."""

    exit_code = 2

    def __init__(self, columns):
        self.columns = tuple(columns)
        super().__init__(f"collinear columns: {', '.join(self.columns)}")


class AllWithinVariationZeroError(NegPanelError):
    """A regressor is constant within every cross-section unit."""

    exit_code = 2

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column!r} has no within-unit variation")


class NameMismatchError(NegPanelError):
    """Requested coefficient names are absent from one of the fits."""


class NoConsecutivePairsError(NegPanelError):
    """No unit contributes two consecutive residuals."""


# --- specification building ------------------------------------------------


class MissingColumnError(NegPanelError):
    """A required variable is absent from the dataset."""


class NonPositiveValueError(NegPanelError):
    """A value that feeds a logarithm is zero or negative."""

    def __init__(self, region, industry, year, column):
        self.cell = (region, industry, year, column)
        super().__init__(
            f"non-positive value in column {column!r} at "
            f"({region}, {industry}, {year})"
        )


class ZeroDenominatorError(NegPanelError):
    """A ratio denominator is zero."""

    def __init__(self, region, industry, year, denominator):
        self.cell = (region, industry, year, denominator)
        super().__init__(
            f"zero denominator {denominator!r} at ({region}, {industry}, {year})"
        )


class LeaderMissingError(NegPanelError):
    """The leader region has no observation for a required cell."""

    def __init__(self, industry, year, message=None):
        self.industry = industry
        self.year = year
        super().__init__(
            message or f"leader region missing for industry {industry!r}, year {year}"
        )


class WeightMismatchError(NegPanelError):
    """Weight vector length does not match the design."""


class NonPositiveWeightError(NegPanelError):
    """A weight is zero, negative, or non-finite."""


class IncompleteCellError(NegPanelError):
    """A national aggregate was requested for an incomplete cell."""

    def __init__(self, industry, year):
        self.industry = industry
        self.year = year
        super().__init__(f"incomplete cell: industry {industry!r}, year {year}")


class EmptySampleError(NegPanelError):
    """No observations survive the sample filters."""


# --- dataset handling -------------------------------------------------------


class DatasetError(NegPanelError):
    """A panel dataset violates its invariants."""


class SchemaMismatchError(NegPanelError):
    """CSV header differs from the documented schema."""

    def __init__(self, missing=(), extra=(), message=None):
        self.missing = tuple(missing)
        self.extra = tuple(extra)
        parts = []
        if missing:
            parts.append(f"missing columns: {', '.join(self.missing)}")
        if extra:
            parts.append(f"unexpected columns: {', '.join(self.extra)}")
        super().__init__(message or ("; ".join(parts) or "schema mismatch"))


class CsvParseError(NegPanelError):
    """A CSV cell could not be parsed."""

    def __init__(self, row: int, column: str, message=None):
        self.row = row
        self.column = column
        super().__init__(message or f"cannot parse row {row}, column {column!r}")


class DuplicateKeyError(NegPanelError):
    """Two observations share the same (region, industry, year)."""

    def __init__(self, region, industry, year):
        self.key = (region, industry, year)
        super().__init__(f"duplicate observation ({region}, {industry}, {year})")


class BadCoefficientNamesError(NegPanelError):
    """Synthetic truth names do not match the target specification."""


class SpecMismatchError(NegPanelError):
    """Results from different specifications cannot share a table."""
