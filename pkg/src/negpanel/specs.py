"""Builders turning a panel dataset into the toolkit's named regression designs.

Available specifications (the CLI vocabulary):

======  =============================================================
eq3     log real wage on national-level regressors
eq3p    eq3 plus log regional productivity
eq4     log real wage on regional-level regressors (with constant)
eq5     log real-wage ratio to the leader region, agglomeration ratios
eq5p    eq5 plus log regional productivity
eq3w    eq3 with rows scaled by the industry's employment share
        within the region's manufacturing total
eq4w    eq4 with rows scaled by the region's employment share within
        the industry's national total
======  =============================================================

Observations with a non-positive value in any column that feeds a
logarithm are dropped and reported on the design (or raised with
``strict=True``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Mapping

import numpy as np

from .data import PanelDataset, PanelObservation
from .exceptions import (
    DatasetError,
    EmptySampleError,
    IncompleteCellError,
    LeaderMissingError,
    MissingColumnError,
    NonPositiveValueError,
    NonPositiveWeightError,
    WeightMismatchError,
    ZeroDenominatorError,
)
from .panel import DesignMatrix

__all__ = [
    "SPEC_NAMES",
    "RatioSet",
    "aggregate_national",
    "compute_rl_ratios",
    "build_eq3",
    "build_eq4",
    "build_eq5",
    "build_weighted_alternative",
    "build_spec",
    "spec_columns",
    "spec_description",
    "weights_industry_in_region",
    "weights_region_in_industry",
    "weights_for_design",
]

logger = logging.getLogger(__name__)

SPEC_NAMES = ("eq3", "eq3p", "eq4", "eq5", "eq5p", "eq3w", "eq4w")

_DESCRIPTIONS = {
    "eq3": "real-wage equation, national regressors",
    "eq3p": "real-wage equation, national regressors, with productivity",
    "eq4": "real-wage equation, regional regressors",
    "eq5": "agglomeration equation (real-wage ratio to the leader region)",
    "eq5p": "agglomeration equation with productivity",
    "eq3w": "employment-weighted variant of eq3",
    "eq4w": "employment-weighted variant of eq4",
}

_EQ3_COLUMNS = ("lnY_pt", "lnT_rpt", "lnG_pt", "lnλ_pt", "lnw_pt", "lnT_prt")
_EQ4_COLUMNS = ("const", "lnY_rt", "lnT_rpt", "lnG_rt", "lnλ_rt", "lnw_rt", "lnT_prt")
_EQ5_COLUMNS = ("const", "lnY_nt", "lnT_rlt", "lnL_nt", "lnRL_rmt", "lnRL_rgt", "lnRL_rkt", "lnRL_rnt")


def spec_description(name: str) -> str:
    return _DESCRIPTIONS[name]


def spec_columns(name: str) -> tuple[str, ...]:
    """Regressor names (in order) of a named specification."""
    if name in ("eq3", "eq3w"):
        return _EQ3_COLUMNS
    if name == "eq3p":
        return _EQ3_COLUMNS + ("lnP_rt",)
    if name in ("eq4", "eq4w"):
        return _EQ4_COLUMNS
    if name == "eq5":
        return _EQ5_COLUMNS
    if name == "eq5p":
        return _EQ5_COLUMNS[:4] + ("lnP_rt",) + _EQ5_COLUMNS[4:]
    raise MissingColumnError(f"unknown specification {name!r}")


def aggregate_national(data: PanelDataset, require_complete: bool = False) -> PanelDataset:
    """Fill national aggregates from the regional columns.

    Per (industry, year): value added and employees are summed over
    regions, nominal wages and price indices are employment-weighted
    means.  Per year: manufacturing employment is summed over all rows.
    Aggregates use whichever regions are present; ``require_complete``
    instead raises :class:`IncompleteCellError` for cells missing a
    registry region.
    """
    by_cell: dict[tuple[str, int], list[PanelObservation]] = {}
    by_year: dict[int, float] = {}
    for o in data.observations:
        by_cell.setdefault((o.industry, o.year), []).append(o)
        by_year[o.year] = by_year.get(o.year, 0.0) + o.employees_regional

    if require_complete:
        for (industry, year), rows in sorted(by_cell.items()):
            if {o.region for o in rows} != set(data.regions):
                raise IncompleteCellError(industry, year)

    national: dict[tuple[str, int], tuple[float, float, float, float]] = {}
    for (industry, year), rows in by_cell.items():
        gva = sum(o.gva_regional for o in rows)
        emp = sum(o.employees_regional for o in rows)
        if emp <= 0.0:
            raise ZeroDenominatorError(rows[0].region, industry, year, "employees_regional")
        wage = sum(o.employees_regional * o.nominal_wage_regional for o in rows) / emp
        price = sum(o.employees_regional * o.price_index_regional for o in rows) / emp
        national[(industry, year)] = (gva, emp, wage, price)

    updated = []
    for o in data.observations:
        gva, emp, wage, price = national[(o.industry, o.year)]
        updated.append(
            replace(
                o,
                gva_national=gva,
                employees_national=emp,
                nominal_wage_national=wage,
                price_index_national=price,
                employees_manufacturing_national=by_year[o.year],
            )
        )
    return data.replace_observations(updated)


@dataclass(frozen=True)
class RatioSet:
    """Employment-concentration ratios of one observation.

    rl_rmt: regional manufacturing total over the industry's regional
    employment; rl_rgt: industry employment over the region's
    all-activities total; rl_rkt: industry employment per km^2 of the
    region; rl_rnt: regional share of the industry's national
    employment.
    """

    rl_rmt: float
    rl_rgt: float
    rl_rkt: float
    rl_rnt: float


def compute_rl_ratios(data: PanelDataset) -> dict[tuple[str, str, int], RatioSet]:
    """Concentration ratios for every observation, keyed by (region, industry, year)."""
    manuf_total: dict[tuple[str, int], float] = {}
    national_industry: dict[tuple[str, int], float] = {}
    for o in data.observations:
        manuf_total[(o.region, o.year)] = manuf_total.get((o.region, o.year), 0.0) + o.employees_regional
        national_industry[(o.industry, o.year)] = (
            national_industry.get((o.industry, o.year), 0.0) + o.employees_regional
        )

    ratios = {}
    for o in data.observations:
        if o.employees_regional <= 0.0:
            raise ZeroDenominatorError(o.region, o.industry, o.year, "employees_regional")
        if o.employees_all_activities_regional <= 0.0:
            raise ZeroDenominatorError(o.region, o.industry, o.year, "employees_all_activities_regional")
        if o.region_area_km2 <= 0.0:
            raise ZeroDenominatorError(o.region, o.industry, o.year, "region_area_km2")
        national = national_industry[(o.industry, o.year)]
        if national <= 0.0:
            raise ZeroDenominatorError(o.region, o.industry, o.year, "national industry employment")
        if o.employees_regional > o.employees_all_activities_regional:
            raise DatasetError(
                f"manufacturing employment exceeds the all-activities total at "
                f"({o.region}, {o.industry}, {o.year})"
            )
        ratios[o.key] = RatioSet(
            rl_rmt=manuf_total[(o.region, o.year)] / o.employees_regional,
            rl_rgt=o.employees_regional / o.employees_all_activities_regional,
            rl_rkt=o.employees_regional / o.region_area_km2,
            rl_rnt=o.employees_regional / national,
        )
    return ratios


def _assemble(
    rows: list[PanelObservation],
    response_column: str,
    response_values: Mapping[tuple, float],
    columns: tuple[str, ...],
    getters: Mapping[str, Callable[[PanelObservation], float]],
    spec_name: str,
    effects: str,
    strict: bool,
) -> DesignMatrix:
    kept_rows = []
    kept_response = []
    kept_values = []
    dropped = []
    log_columns = [c for c in columns if c != "const"]
    for o in rows:
        raw = {c: getters[c](o) for c in log_columns}
        raw[response_column] = response_values[o.key]
        bad = [c for c, v in raw.items() if not v > 0.0]
        if bad:
            if strict:
                raise NonPositiveValueError(o.region, o.industry, o.year, bad[0])
            dropped.extend((o.region, o.industry, o.year, c) for c in bad)
            continue
        kept_rows.append(o)
        kept_response.append(np.log(raw[response_column]))
        kept_values.append([1.0 if c == "const" else np.log(raw[c]) for c in columns])

    if dropped:
        logger.info("%s: dropped %d cells with non-positive values", spec_name, len(dropped))
    if not kept_rows:
        raise EmptySampleError(f"{spec_name}: no observation survives the positivity filter")

    return DesignMatrix(
        response=np.array(kept_response),
        regressors=np.array(kept_values),
        names=columns,
        units=np.array([f"{o.region}|{o.industry}" for o in kept_rows]),
        periods=np.array([o.year for o in kept_rows]),
        effects=effects,
        regions=np.array([o.region for o in kept_rows]),
        industries=np.array([o.industry for o in kept_rows]),
        spec_name=spec_name,
        dropped=tuple(dropped),
    )


def build_eq3(
    data: PanelDataset,
    with_productivity: bool = False,
    effects: str = "unit",
    strict: bool = False,
) -> DesignMatrix:
    """Log real wage regressed on national aggregates (optionally + productivity)."""
    agg = aggregate_national(data)
    columns = spec_columns("eq3p" if with_productivity else "eq3")
    getters = {
        "lnY_pt": lambda o: o.gva_national,
        "lnT_rpt": lambda o: o.flow_to_nation,
        "lnG_pt": lambda o: o.price_index_national,
        "lnλ_pt": lambda o: o.employees_national,
        "lnw_pt": lambda o: o.nominal_wage_national,
        "lnT_prt": lambda o: o.flow_from_nation,
        "lnP_rt": lambda o: o.productivity,
    }
    response = {o.key: o.real_wage for o in agg.observations}
    return _assemble(
        list(agg.observations),
        "real_wage",
        response,
        columns,
        getters,
        "eq3p" if with_productivity else "eq3",
        effects,
        strict,
    )


def build_eq4(data: PanelDataset, effects: str = "unit", strict: bool = False) -> DesignMatrix:
    """Log real wage regressed on regional-level variables, with a constant."""
    getters = {
        "lnY_rt": lambda o: o.gva_regional,
        "lnT_rpt": lambda o: o.flow_to_nation,
        "lnG_rt": lambda o: o.price_index_regional,
        "lnλ_rt": lambda o: o.employees_regional,
        "lnw_rt": lambda o: o.nominal_wage_regional,
        "lnT_prt": lambda o: o.flow_from_nation,
    }
    response = {o.key: o.real_wage for o in data.observations}
    return _assemble(
        list(data.observations),
        "real_wage",
        response,
        spec_columns("eq4"),
        getters,
        "eq4",
        effects,
        strict,
    )


def build_eq5(
    data: PanelDataset,
    leader_region: str,
    with_productivity: bool = False,
    include_leader: bool = False,
    effects: str = "unit",
    strict: bool = False,
) -> DesignMatrix:
    """Log real-wage ratio to the leader region on scale and concentration terms.

    Every (industry, year) cell used must contain the leader region
    (:class:`LeaderMissingError` otherwise).  The leader's own rows have
    a response of exactly zero and are excluded unless
    ``include_leader`` is set.
    """
    if leader_region not in data.regions:
        raise LeaderMissingError(None, None, f"leader region {leader_region!r} not in dataset")
    agg = aggregate_national(data)
    ratios = compute_rl_ratios(agg)

    leader_wage = {
        (o.industry, o.year): o.real_wage
        for o in agg.observations
        if o.region == leader_region
    }

    rows = []
    response = {}
    for o in agg.observations:
        if o.region == leader_region and not include_leader:
            continue
        if (o.industry, o.year) not in leader_wage:
            raise LeaderMissingError(o.industry, o.year)
        rows.append(o)
        base = leader_wage[(o.industry, o.year)]
        response[o.key] = o.real_wage / base if base > 0.0 else -1.0

    columns = spec_columns("eq5p" if with_productivity else "eq5")
    getters = {
        "lnY_nt": lambda o: o.gva_national,
        "lnT_rlt": lambda o: o.flow_to_leader,
        "lnL_nt": lambda o: o.employees_manufacturing_national,
        "lnP_rt": lambda o: o.productivity,
        "lnRL_rmt": lambda o: ratios[o.key].rl_rmt,
        "lnRL_rgt": lambda o: ratios[o.key].rl_rgt,
        "lnRL_rkt": lambda o: ratios[o.key].rl_rkt,
        "lnRL_rnt": lambda o: ratios[o.key].rl_rnt,
    }
    return _assemble(
        rows,
        "real_wage_ratio",
        response,
        columns,
        getters,
        "eq5p" if with_productivity else "eq5",
        effects,
        strict,
    )


def build_weighted_alternative(
    base: DesignMatrix,
    weights,
    scale_response: bool = True,
) -> DesignMatrix:
    """Scale every regressor (and, by default, the response) row-wise.

    Whole-row scaling preserves exact-fit solutions; pass
    ``scale_response=False`` for the regressors-only variant.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (base.n_obs,):
        raise WeightMismatchError(
            f"expected {base.n_obs} weights, got shape {w.shape}"
        )
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise NonPositiveWeightError("weights must be strictly positive and finite")
    suffix = "" if base.spec_name.endswith("w") else "w"
    return DesignMatrix(
        response=base.response * w if scale_response else base.response,
        regressors=base.regressors * w[:, None],
        names=base.names,
        units=base.units,
        periods=base.periods,
        effects=base.effects,
        regions=base.regions,
        industries=base.industries,
        spec_name=base.spec_name + suffix if base.spec_name else base.spec_name,
        dropped=base.dropped,
    )


def weights_industry_in_region(data: PanelDataset) -> dict[tuple[str, str, int], float]:
    """Employment share of each industry within its region's manufacturing total."""
    totals: dict[tuple[str, int], float] = {}
    for o in data.observations:
        totals[(o.region, o.year)] = totals.get((o.region, o.year), 0.0) + o.employees_regional
    out = {}
    for o in data.observations:
        total = totals[(o.region, o.year)]
        if total <= 0.0:
            raise ZeroDenominatorError(o.region, o.industry, o.year, "regional manufacturing employment")
        out[o.key] = o.employees_regional / total
    return out


def weights_region_in_industry(data: PanelDataset) -> dict[tuple[str, str, int], float]:
    """Employment share of each region within its industry's national total."""
    totals: dict[tuple[str, int], float] = {}
    for o in data.observations:
        totals[(o.industry, o.year)] = totals.get((o.industry, o.year), 0.0) + o.employees_regional
    out = {}
    for o in data.observations:
        total = totals[(o.industry, o.year)]
        if total <= 0.0:
            raise ZeroDenominatorError(o.region, o.industry, o.year, "national industry employment")
        out[o.key] = o.employees_regional / total
    return out


def weights_for_design(design: DesignMatrix, mapping: Mapping[tuple[str, str, int], float]) -> np.ndarray:
    """Align a per-observation weight mapping with a design's rows."""
    if design.regions is None or design.industries is None:
        raise WeightMismatchError("design carries no region/industry labels")
    try:
        return np.array(
            [
                mapping[(r, i, int(p))]
                for r, i, p in zip(design.regions, design.industries, design.periods)
            ]
        )
    except KeyError as exc:
        raise WeightMismatchError(f"no weight for observation {exc}") from None


def build_spec(
    name: str,
    data: PanelDataset,
    leader_region: str | None = None,
    include_leader: bool = False,
    effects: str = "unit",
    strict: bool = False,
) -> DesignMatrix:
    """Dispatch a specification name to its builder."""
    if name not in SPEC_NAMES:
        raise MissingColumnError(f"unknown specification {name!r}")
    if name in ("eq3", "eq3p"):
        return build_eq3(data, with_productivity=(name == "eq3p"), effects=effects, strict=strict)
    if name == "eq4":
        return build_eq4(data, effects=effects, strict=strict)
    if name in ("eq5", "eq5p"):
        if leader_region is None:
            raise LeaderMissingError(None, None, "eq5 specifications need a leader region")
        return build_eq5(
            data,
            leader_region,
            with_productivity=(name == "eq5p"),
            include_leader=include_leader,
            effects=effects,
            strict=strict,
        )
    if name == "eq3w":
        base = build_eq3(data, effects=effects, strict=strict)
        weights = weights_for_design(base, weights_industry_in_region(data))
    else:  # eq4w
        base = build_eq4(data, effects=effects, strict=strict)
        weights = weights_for_design(base, weights_region_in_industry(data))
    return build_weighted_alternative(base, weights)
