"""Panel dataset container, CSV ingestion/export and validation reporting.

The CSV schema (version "1") is one row per (region, industry, year)
with header exactly::

    region,industry,year,real_wage,gva_regional,price_index_regional,
    employees_regional,employees_all_activities_regional,
    nominal_wage_regional,flow_to_nation,flow_from_nation,
    flow_to_leader,region_area_km2

UTF-8, '.' decimal separator, missing cells are absent rows.  National
aggregates are always computed downstream, never ingested.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from .exceptions import (
    CsvParseError,
    DatasetError,
    DuplicateKeyError,
    EmptySampleError,
    SchemaMismatchError,
)

__all__ = [
    "CSV_COLUMNS",
    "PanelObservation",
    "PanelDataset",
    "PanelValidationReport",
    "load_csv",
    "save_csv",
    "validate_panel",
]

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "region",
    "industry",
    "year",
    "real_wage",
    "gva_regional",
    "price_index_regional",
    "employees_regional",
    "employees_all_activities_regional",
    "nominal_wage_regional",
    "flow_to_nation",
    "flow_from_nation",
    "flow_to_leader",
    "region_area_km2",
)
_SCHEMAS = {"1": CSV_COLUMNS}

# numeric columns checked for strict positivity by validate_panel
_POSITIVE_COLUMNS = CSV_COLUMNS[3:]


@dataclass(frozen=True)
class PanelObservation:
    """One (region, industry, year) cell with its raw variables.

    National aggregates stay ``None`` until filled by
    ``specs.aggregate_national``; ``productivity`` is derived as regional
    value added per regional employee.
    """

    region: str
    industry: str
    year: int
    real_wage: float
    gva_regional: float
    price_index_regional: float
    employees_regional: float
    employees_all_activities_regional: float
    nominal_wage_regional: float
    flow_to_nation: float
    flow_from_nation: float
    flow_to_leader: float
    region_area_km2: float
    gva_national: float | None = None
    price_index_national: float | None = None
    employees_national: float | None = None
    employees_manufacturing_national: float | None = None
    nominal_wage_national: float | None = None

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.region, self.industry, self.year)

    @property
    def productivity(self) -> float:
        return self.gva_regional / self.employees_regional


@dataclass(frozen=True)
class PanelDataset:
    """Immutable unbalanced panel with region/industry registries.

    Registries (regions with areas, industries, observed years) are
    derived from the observations; keys are unique and the year range
    spans at least two years.
    """

    observations: tuple[PanelObservation, ...]

    def __post_init__(self):
        obs = tuple(sorted(self.observations, key=lambda o: o.key))
        if not obs:
            raise EmptySampleError("a panel dataset needs at least one observation")
        seen = set()
        areas: dict[str, float] = {}
        for o in obs:
            if o.key in seen:
                raise DuplicateKeyError(o.region, o.industry, o.year)
            seen.add(o.key)
            known = areas.get(o.region)
            if known is None:
                areas[o.region] = o.region_area_km2
            elif known != o.region_area_km2:
                raise DatasetError(
                    f"region {o.region!r} has inconsistent areas "
                    f"({known} vs {o.region_area_km2})"
                )
        years = sorted({o.year for o in obs})
        if years[-1] - years[0] < 1:
            raise DatasetError("the year range must span at least two years")
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "_areas", areas)
        object.__setattr__(self, "_regions", tuple(sorted(areas)))
        object.__setattr__(self, "_industries", tuple(sorted({o.industry for o in obs})))
        object.__setattr__(self, "_years", tuple(years))

    @property
    def regions(self) -> tuple[str, ...]:
        return self._regions

    @property
    def industries(self) -> tuple[str, ...]:
        return self._industries

    @property
    def years(self) -> tuple[int, ...]:
        """Observed years, ascending."""
        return self._years

    @property
    def year_range(self) -> tuple[int, int]:
        return (self._years[0], self._years[-1])

    @property
    def n_obs(self) -> int:
        return len(self.observations)

    def region_area(self, region: str) -> float:
        try:
            return self._areas[region]
        except KeyError:
            raise DatasetError(f"unknown region {region!r}") from None

    def subset(self, predicate: Callable[[PanelObservation], bool]) -> "PanelDataset":
        return PanelDataset(tuple(o for o in self.observations if predicate(o)))

    def replace_observations(self, observations: Iterable[PanelObservation]) -> "PanelDataset":
        return PanelDataset(tuple(observations))


def _parse_float(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise CsvParseError(row, column, f"row {row}: {column!r} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise CsvParseError(row, column, f"row {row}: {column!r} must be finite")
    return value


def load_csv(path, schema_version: str = "1") -> PanelDataset:
    """Read and validate a panel CSV file.

    The header must match the documented schema exactly; unparseable
    cells raise :class:`CsvParseError` with row and column, duplicate
    keys raise :class:`DuplicateKeyError`.
    """
    if schema_version not in _SCHEMAS:
        raise SchemaMismatchError(message=f"unknown schema version {schema_version!r}")
    columns = _SCHEMAS[schema_version]
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError(missing=columns, message="empty file") from None
        if tuple(header) != columns:
            missing = [c for c in columns if c not in header]
            extra = [c for c in header if c not in columns]
            if not missing and not extra:
                raise SchemaMismatchError(
                    message=f"columns out of order: expected {', '.join(columns)}"
                )
            raise SchemaMismatchError(missing=missing, extra=extra)

        observations = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns):
                raise CsvParseError(line_no, "", f"row {line_no}: expected {len(columns)} fields, got {len(row)}")
            record = dict(zip(columns, row))
            region = record["region"].strip()
            industry = record["industry"].strip()
            if not region or not industry:
                raise CsvParseError(line_no, "region" if not region else "industry")
            try:
                year = int(record["year"])
            except ValueError:
                raise CsvParseError(line_no, "year", f"row {line_no}: year is not an integer: {record['year']!r}") from None
            values = {c: _parse_float(record[c], line_no, c) for c in columns[3:]}
            observations.append(PanelObservation(region=region, industry=industry, year=year, **values))

    data = PanelDataset(tuple(observations))
    logger.info("loaded %d observations from %s", data.n_obs, path)
    return data


def _format_value(value: float) -> str:
    # repr() is the shortest exact round-trip representation
    return repr(float(value))


def save_csv(data: PanelDataset, path) -> None:
    """Write a dataset back to the schema; floats keep full precision."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for o in data.observations:
            writer.writerow(
                [o.region, o.industry, o.year]
                + [_format_value(getattr(o, c)) for c in CSV_COLUMNS[3:]]
            )


@dataclass(frozen=True)
class PanelValidationReport:
    """Findings from a structural pass over a dataset."""

    n_obs: int
    n_units: int
    year_range: tuple[int, int]
    positivity: tuple[tuple[str, str, int, str], ...]
    missing_cells: tuple[tuple[str, str, int], ...]
    min_periods_per_unit: int
    max_periods_per_unit: int

    @property
    def findings(self) -> int:
        return len(self.positivity) + len(self.missing_cells)

    @property
    def is_clean(self) -> bool:
        return self.findings == 0

    def summary(self) -> str:
        lines = [
            f"observations: {self.n_obs}",
            f"units: {self.n_units}",
            f"years: {self.year_range[0]}-{self.year_range[1]}",
            f"periods per unit: {self.min_periods_per_unit}-{self.max_periods_per_unit}",
            f"missing cells: {len(self.missing_cells)}",
            f"positivity violations: {len(self.positivity)}",
        ]
        return "\n".join(lines)


def validate_panel(data: PanelDataset) -> PanelValidationReport:
    """Report positivity violations, missing cells and balance statistics."""
    positivity = []
    for o in data.observations:
        for column in _POSITIVE_COLUMNS:
            if getattr(o, column) <= 0.0:
                positivity.append((o.region, o.industry, o.year, column))

    present = {o.key for o in data.observations}
    lo, hi = data.year_range
    missing = [
        (region, industry, year)
        for region in data.regions
        for industry in data.industries
        for year in range(lo, hi + 1)
        if (region, industry, year) not in present
    ]

    counts: dict[tuple[str, str], int] = {}
    for o in data.observations:
        unit = (o.region, o.industry)
        counts[unit] = counts.get(unit, 0) + 1

    return PanelValidationReport(
        n_obs=data.n_obs,
        n_units=len(counts),
        year_range=data.year_range,
        positivity=tuple(positivity),
        missing_cells=tuple(missing),
        min_periods_per_unit=min(counts.values()),
        max_periods_per_unit=max(counts.values()),
    )
