"""Synthetic panel generation with known ground-truth coefficients.

The generated log response equals the target specification's linear
combination of log regressors plus a unit effect and observation noise,
so estimator-recovery tests know the exact truth.  All randomness flows
through the embedded xorshift generator in a fixed draw order: the same
config yields a byte-identical dataset on any platform.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .data import PanelDataset, PanelObservation
from .exceptions import BadCoefficientNamesError, EmptySampleError
from .rng import XorShift64Star
from .specs import SPEC_NAMES, build_spec, spec_columns

__all__ = ["SyntheticConfig", "SyntheticTruth", "generate_synthetic", "drop_cells"]

_BASE_YEAR = 2001


@dataclass(frozen=True)
class SyntheticConfig:
    """Recipe for one synthetic panel.

    ``true_coefficients`` must name exactly the target specification's
    columns.  ``leader_region`` (defaulting to the first region for the
    ratio specifications) is exempt from random missingness so the
    ratio response stays computable.
    """

    true_coefficients: dict[str, float]
    effect_sd: float = 0.0
    noise_sd: float = 0.1
    missing_rate: float = 0.0
    seed: int = 0
    dimensions: tuple[int, int, int] = (5, 9, 8)
    leader_region: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "true_coefficients", dict(self.true_coefficients))
        r, i, t = self.dimensions
        if r < 2 or i < 1 or t < 2:
            raise ValueError("dimensions must be at least (2, 1, 2)")
        if self.effect_sd < 0 or self.noise_sd <= 0:
            raise ValueError("effect_sd must be >= 0 and noise_sd > 0")
        if not 0.0 <= self.missing_rate < 1.0:
            raise ValueError("missing_rate must lie in [0, 1)")


@dataclass(frozen=True)
class SyntheticTruth:
    """Exact generating values for a synthetic dataset."""

    spec: str
    coefficients: dict[str, float]
    effect_sd: float
    noise_sd: float
    missing_rate: float
    seed: int
    dimensions: tuple[int, int, int]
    leader_region: str | None
    n_obs: int

    def to_json(self) -> str:
        payload = {
            "spec": self.spec,
            "coefficients": self.coefficients,
            "effect_sd": self.effect_sd,
            "noise_sd": self.noise_sd,
            "missing_rate": self.missing_rate,
            "seed": self.seed,
            "dimensions": list(self.dimensions),
            "leader_region": self.leader_region,
            "n_obs": self.n_obs,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _region_names(n: int) -> list[str]:
    return [f"R{i:02d}" for i in range(1, n + 1)]


def _industry_names(n: int) -> list[str]:
    return [f"I{i:02d}" for i in range(1, n + 1)]


def generate_synthetic(cfg: SyntheticConfig, spec: str) -> tuple[PanelDataset, SyntheticTruth]:
    """Generate a panel whose response follows the named specification.

    Raw positive columns are drawn log-normally; the real wage is then
    assigned so the specification's log response equals ``X @ beta + unit effect
    + noise`` exactly.  For the ratio specifications the leader region's
    wages are drawn freely and the other regions are set relative to
    them.  The weighted variants share their base spec's generating
    process (row weights enter at estimation time only).
    """
    if spec not in SPEC_NAMES:
        raise BadCoefficientNamesError(f"unknown specification {spec!r}")
    columns = spec_columns(spec)
    if set(cfg.true_coefficients) != set(columns):
        missing = sorted(set(columns) - set(cfg.true_coefficients))
        extra = sorted(set(cfg.true_coefficients) - set(columns))
        raise BadCoefficientNamesError(
            f"coefficient names do not match {spec}: missing {missing}, unexpected {extra}"
        )

    n_regions, n_industries, n_years = cfg.dimensions
    regions = _region_names(n_regions)
    industries = _industry_names(n_industries)
    years = list(range(_BASE_YEAR, _BASE_YEAR + n_years))
    ratio_spec = spec in ("eq5", "eq5p")
    leader = cfg.leader_region
    if ratio_spec and leader is None:
        leader = regions[0]
    if leader is not None and leader not in regions:
        raise BadCoefficientNamesError(f"leader region {leader!r} outside the generated grid")

    rng = XorShift64Star(cfg.seed)

    area = {r: rng.lognormal(7.0, 0.5) for r in regions}
    flows = {}
    for r in regions:
        for year in years:
            flows[(r, year)] = (
                rng.lognormal(2.0, 0.4),
                rng.lognormal(2.0, 0.4),
                rng.lognormal(2.0, 0.4),
            )

    employees = {}
    gva = {}
    price = {}
    wage = {}
    for r in regions:
        for ind in industries:
            for year in years:
                key = (r, ind, year)
                employees[key] = rng.lognormal(2.0, 0.5)
                gva[key] = rng.lognormal(3.0, 0.5)
                price[key] = rng.lognormal(0.0, 0.2)
                wage[key] = rng.lognormal(1.0, 0.3)

    all_activities = {}
    for r in regions:
        for year in years:
            manufacturing = sum(employees[(r, ind, year)] for ind in industries)
            all_activities[(r, year)] = manufacturing * (1.0 + rng.lognormal(0.5, 0.3))

    leader_wage = {}
    if ratio_spec:
        for ind in industries:
            for year in years:
                leader_wage[(ind, year)] = rng.lognormal(0.3, 0.2)

    observations = []
    for r in regions:
        for ind in industries:
            for year in years:
                key = (r, ind, year)
                to_nation, from_nation, to_leader = flows[(r, year)]
                if ratio_spec and r == leader:
                    omega = leader_wage[(ind, year)]
                else:
                    omega = 1.0  # placeholder, assigned from the response below
                observations.append(
                    PanelObservation(
                        region=r,
                        industry=ind,
                        year=year,
                        real_wage=omega,
                        gva_regional=gva[key],
                        price_index_regional=price[key],
                        employees_regional=employees[key],
                        employees_all_activities_regional=all_activities[(r, year)],
                        nominal_wage_regional=wage[key],
                        flow_to_nation=to_nation,
                        flow_from_nation=from_nation,
                        flow_to_leader=to_leader,
                        region_area_km2=area[r],
                    )
                )
    grid = PanelDataset(tuple(observations))

    # weighted variants share the base spec's generating process; the row
    # weights only enter at estimation time
    base_spec = {"eq3w": "eq3", "eq4w": "eq4"}.get(spec, spec)
    design = build_spec(base_spec, grid, leader_region=leader, effects="unit")
    beta = [cfg.true_coefficients[name] for name in design.names]

    unit_effect = {}
    for r in regions:
        for ind in industries:
            unit_effect[f"{r}|{ind}"] = rng.normal(0.0, cfg.effect_sd) if cfg.effect_sd > 0 else 0.0

    target = {}
    x = design.regressors
    for row, (unit, period, region_label, industry_label) in enumerate(
        zip(design.units, design.periods, design.regions, design.industries)
    ):
        linear = float(x[row] @ beta)
        log_response = linear + unit_effect[str(unit)] + rng.normal(0.0, cfg.noise_sd)
        target[(str(region_label), str(industry_label), int(period))] = log_response

    assigned = []
    for o in grid.observations:
        if o.key in target:
            if ratio_spec:
                omega = leader_wage[(o.industry, o.year)] * math.exp(target[o.key])
            else:
                omega = math.exp(target[o.key])
            assigned.append(replace(o, real_wage=omega))
        else:
            assigned.append(o)
    data = grid.replace_observations(assigned)

    if cfg.missing_rate > 0.0:
        kept = []
        for o in data.observations:
            protected = leader is not None and o.region == leader
            if not protected and rng.uniform() <= cfg.missing_rate:
                continue
            kept.append(o)
        if not kept:
            raise EmptySampleError("missingness removed every observation")
        data = data.replace_observations(kept)

    truth = SyntheticTruth(
        spec=spec,
        coefficients=dict(cfg.true_coefficients),
        effect_sd=cfg.effect_sd,
        noise_sd=cfg.noise_sd,
        missing_rate=cfg.missing_rate,
        seed=cfg.seed,
        dimensions=cfg.dimensions,
        leader_region=leader,
        n_obs=data.n_obs,
    )
    return data, truth


def drop_cells(
    data: PanelDataset,
    count: int,
    seed: int = 0,
    protect_region: str | None = None,
) -> PanelDataset:
    """Remove exactly ``count`` observations chosen by the embedded RNG.

    Rows of ``protect_region`` are never removed; useful for carving a
    fixed-size unbalanced fixture out of a full grid.
    """
    rng = XorShift64Star(seed)
    droppable = [
        idx for idx, o in enumerate(data.observations) if o.region != protect_region
    ]
    if count > len(droppable):
        raise ValueError(f"cannot drop {count} of {len(droppable)} droppable rows")
    chosen = {droppable[i] for i in rng.sample_indices(len(droppable), count)}
    kept = [o for idx, o in enumerate(data.observations) if idx not in chosen]
    return data.replace_observations(kept)
