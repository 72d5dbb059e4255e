"""Regional wage/price-index system and its damped fixed-point solver.

The model: each region r carries income Y_r, manufacturing labor lambda_r
and faces iceberg transport factors T_rs >= 1.  Nominal wages, CES price
indices and real wages are linked by

    w_r = [ sum_s Y_s T_rs^(1-sigma) G_s^(sigma-1) ]^(1/sigma)
    G_r = [ sum_s lambda_s (w_s T_sr)^(1-sigma) ]^(1/(1-sigma))
    omega_r = w_r * G_r^(-mu)

Everything here is a pure function of immutable inputs; the solver is
single-threaded per call and safe to invoke concurrently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .exceptions import (
    DegenerateLaborError,
    InvalidEconomyError,
    NoConvergenceError,
    NonPositiveInputError,
    NonPositiveWageError,
)

__all__ = [
    "NegParameters",
    "SpatialEconomy",
    "EquilibriumState",
    "access_bracket",
    "cost_bracket",
    "price_index",
    "price_indices",
    "nominal_wage_rhs",
    "nominal_wages_rhs",
    "real_wage",
    "real_wages",
    "log_real_wage",
    "income",
    "solve_equilibrium",
    "equilibrium_defect",
    "load_economy",
    "with_params",
]


@dataclass(frozen=True)
class NegParameters:
    """Structural parameters: substitution elasticity and expenditure share.

    ``sigma`` must exceed 1 (the exponents 1 - sigma and -mu/(1 - sigma)
    blow up at sigma = 1); ``mu`` is the manufacturing share of
    expenditure and lies strictly inside (0, 1).
    """

    sigma: float = 5.0
    mu: float = 0.4

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 1.0):
            raise InvalidEconomyError(f"sigma must be finite and > 1, got {self.sigma}")
        if not (math.isfinite(self.mu) and 0.0 < self.mu < 1.0):
            raise InvalidEconomyError(f"mu must lie in (0, 1), got {self.mu}")


def _vector(name: str, values, n: int | None = None, minimum: float | None = None) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidEconomyError(f"{name} must be one-dimensional")
    if n is not None and arr.size != n:
        raise InvalidEconomyError(f"{name} must have length {n}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InvalidEconomyError(f"{name} contains non-finite entries")
    if minimum is not None and np.any(arr < minimum):
        raise InvalidEconomyError(f"{name} entries must be >= {minimum}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpatialEconomy:
    """Immutable parameterization of an R-region economy.

    ``transport[r, s]`` is the iceberg factor on shipments from r to s;
    the diagonal is exactly 1 and every entry is at least 1.
    ``immobile_income`` is the part of income that does not respond to
    wages; it only matters when incomes are endogenized.
    """

    regions: tuple[str, ...]
    income: np.ndarray
    labor: np.ndarray
    transport: np.ndarray
    params: NegParameters = field(default_factory=NegParameters)
    immobile_income: np.ndarray | None = None

    def __post_init__(self):
        regions = tuple(str(r) for r in self.regions)
        if not regions:
            raise InvalidEconomyError("at least one region is required")
        if len(set(regions)) != len(regions):
            raise InvalidEconomyError("region labels must be unique")
        n = len(regions)
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "income", _vector("income", self.income, n, minimum=0.0))
        object.__setattr__(self, "labor", _vector("labor", self.labor, n, minimum=0.0))
        phi = self.immobile_income if self.immobile_income is not None else np.zeros(n)
        object.__setattr__(
            self, "immobile_income", _vector("immobile_income", phi, n, minimum=0.0)
        )
        t = np.array(self.transport, dtype=float)
        if t.shape != (n, n):
            raise InvalidEconomyError(f"transport must be {n}x{n}, got {t.shape}")
        if not np.all(np.isfinite(t)):
            raise InvalidEconomyError("transport contains non-finite entries")
        if np.any(t < 1.0):
            raise InvalidEconomyError("transport factors must be >= 1")
        if np.any(np.diag(t) != 1.0):
            raise InvalidEconomyError("transport diagonal must be exactly 1")
        t.setflags(write=False)
        object.__setattr__(self, "transport", t)

    @property
    def n_regions(self) -> int:
        return len(self.regions)


@dataclass(frozen=True)
class EquilibriumState:
    """Solved wages, price indices and real wages, plus solver telemetry.

    ``income`` is the income vector the returned wages are an exact fixed
    point of (the solver re-expresses incomes in wage-numeraire units, so
    it generally differs from the input economy's by a scalar factor).
    ``residual`` is the maximum relative fixed-point defect at the
    returned point.
    """

    nominal_wage: np.ndarray
    price_index: np.ndarray
    real_wage: np.ndarray
    income: np.ndarray
    params: NegParameters
    iterations: int
    residual: float

    def __post_init__(self):
        n = len(self.nominal_wage)
        for name in ("nominal_wage", "price_index", "real_wage"):
            arr = _vector(name, getattr(self, name), n)
            if np.any(arr <= 0.0):
                raise InvalidEconomyError(f"{name} must be strictly positive")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "income", _vector("income", self.income, n, minimum=0.0))
        implied = self.nominal_wage * self.price_index ** (-self.params.mu)
        if np.max(np.abs(implied - self.real_wage) / implied) > 1e-12:
            raise InvalidEconomyError("real wages inconsistent with w * G^(-mu)")


def _check_positive(name: str, values, n: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise NonPositiveInputError(f"{name} must have length {n}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        if name == "wages":
            raise NonPositiveWageError("wages must be strictly positive and finite")
        raise NonPositiveInputError(f"{name} must be strictly positive and finite")
    return arr


def cost_bracket(econ: SpatialEconomy, wages) -> np.ndarray:
    """Cost-of-living aggregate sum_s lambda_s (w_s T_sr)^(1-sigma), per region."""
    w = _check_positive("wages", wages, econ.n_regions)
    e = 1.0 - econ.params.sigma
    terms = econ.labor[:, None] * (w[:, None] * econ.transport) ** e
    out = terms.sum(axis=0)
    if np.any(out <= 0.0):
        raise DegenerateLaborError("cost aggregate vanished (all labor zero)")
    return out


def access_bracket(econ: SpatialEconomy, price_indices, income=None) -> np.ndarray:
    """Market-access aggregate sum_s Y_s T_rs^(1-sigma) G_s^(sigma-1), per region."""
    g = _check_positive("price indices", price_indices, econ.n_regions)
    y = econ.income if income is None else np.asarray(income, dtype=float)
    sigma = econ.params.sigma
    terms = y[None, :] * econ.transport ** (1.0 - sigma) * g[None, :] ** (sigma - 1.0)
    return terms.sum(axis=1)


def price_indices(econ: SpatialEconomy, wages) -> np.ndarray:
    """CES price index for every region, given nominal wages."""
    return cost_bracket(econ, wages) ** (1.0 / (1.0 - econ.params.sigma))


def price_index(econ: SpatialEconomy, wages, r: int) -> float:
    """CES price index of region ``r`` given nominal wages everywhere."""
    return float(price_indices(econ, wages)[r])


def nominal_wages_rhs(econ: SpatialEconomy, price_indices, income=None) -> np.ndarray:
    """Wage assigned to every region by the market-access condition."""
    return access_bracket(econ, price_indices, income) ** (1.0 / econ.params.sigma)


def nominal_wage_rhs(econ: SpatialEconomy, price_indices, r: int, income=None) -> float:
    """Wage the market-access condition assigns to region ``r``."""
    return float(nominal_wages_rhs(econ, price_indices, income)[r])


def real_wage(w: float, g: float, params: NegParameters) -> float:
    """Deflate a nominal wage by the price index: w * G^(-mu)."""
    if not (w > 0.0 and g > 0.0 and math.isfinite(w) and math.isfinite(g)):
        raise NonPositiveInputError("wage and price index must be positive and finite")
    return w * g ** (-params.mu)


def real_wages(wages, price_indices, params: NegParameters) -> np.ndarray:
    w = np.asarray(wages, dtype=float)
    g = np.asarray(price_indices, dtype=float)
    if np.any(w <= 0.0) or np.any(g <= 0.0):
        raise NonPositiveInputError("wages and price indices must be positive")
    return w * g ** (-params.mu)


def log_real_wage(access_term: float, cost_term: float, params: NegParameters) -> float:
    """Log real wage from the two aggregate terms of the wage equation.

    Equals ``(1/sigma) * log(access) - (mu / (1 - sigma)) * log(cost)``,
    the log of the value the reduced form builds from the same terms.
    """
    if not (access_term > 0.0 and cost_term > 0.0):
        raise NonPositiveInputError("both aggregate terms must be positive")
    sigma, mu = params.sigma, params.mu
    return math.log(access_term) / sigma - mu / (1.0 - sigma) * math.log(cost_term)


def income(econ: SpatialEconomy, wages) -> np.ndarray:
    """Endogenous income mu * lambda_r * w_r + (1 - mu) * phi_r, per region."""
    w = _check_positive("wages", wages, econ.n_regions)
    mu = econ.params.mu
    return mu * econ.labor * w + (1.0 - mu) * econ.immobile_income


def _defect(econ: SpatialEconomy, w, g, y) -> float:
    w_target = nominal_wages_rhs(econ, g, income=y)
    g_target = price_indices(econ, w)
    dw = float(np.max(np.abs(w - w_target) / w))
    dg = float(np.max(np.abs(g - g_target) / g))
    return max(dw, dg)


def solve_equilibrium(
    econ: SpatialEconomy,
    endogenous_income: bool = False,
    damping: float = 0.5,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> EquilibriumState:
    """Solve the wage/price-index system by damped successive relaxation.

    Wages are normalized so the labor-weighted mean nominal wage is 1;
    incomes (and immobile incomes, when endogenized) are re-expressed in
    the same units each iteration, which the model's joint homogeneity
    makes an exact change of numeraire.  The returned state satisfies
    both fixed-point conditions to within ``tol`` relative, measured at
    the returned point.

    Raises :class:`NoConvergenceError` with the final residual when the
    iteration cap is reached.
    """
    if not (0.0 < damping <= 1.0):
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    if not (tol > 0.0):
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    lam_total = float(econ.labor.sum())
    if lam_total <= 0.0:
        raise InvalidEconomyError("total labor must be positive to solve")

    lam_share = econ.labor / lam_total
    mu = econ.params.mu
    sigma = econ.params.sigma
    y = econ.income.copy()
    phi = econ.immobile_income.copy()

    w = np.ones(econ.n_regions)
    g = price_indices(econ, w)
    if endogenous_income:
        y = mu * econ.labor * w + (1.0 - mu) * phi
    if not np.any(y > 0.0):
        raise InvalidEconomyError("income must be positive somewhere")

    residual = math.inf
    for iteration in range(1, max_iter + 1):
        w_target = nominal_wages_rhs(econ, g, income=y)
        g_target = price_indices(econ, w)
        w = (1.0 - damping) * w + damping * w_target
        g = (1.0 - damping) * g + damping * g_target

        scale = float(lam_share @ w)
        w /= scale
        g /= scale
        y /= scale
        phi /= scale
        if endogenous_income:
            y = mu * econ.labor * w + (1.0 - mu) * phi

        residual = _defect(econ, w, g, y)
        if residual <= tol:
            return EquilibriumState(
                nominal_wage=w,
                price_index=g,
                real_wage=w * g ** (-mu),
                income=y,
                params=econ.params,
                iterations=iteration,
                residual=residual,
            )
    raise NoConvergenceError(iterations=max_iter, residual=residual)


def equilibrium_defect(econ: SpatialEconomy, state: EquilibriumState) -> float:
    """Recompute the fixed-point defect of a solved state from scratch."""
    return _defect(econ, state.nominal_wage, state.price_index, state.income)


def load_economy(path) -> SpatialEconomy:
    """Read a :class:`SpatialEconomy` from a JSON file.

    Expected keys: ``regions``, ``income``, ``labor``, ``transport``,
    optional ``immobile_income``, ``sigma``, ``mu``.
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        params = NegParameters(
            sigma=float(raw.get("sigma", NegParameters.sigma)),
            mu=float(raw.get("mu", NegParameters.mu)),
        )
        return SpatialEconomy(
            regions=tuple(raw["regions"]),
            income=raw["income"],
            labor=raw["labor"],
            transport=raw["transport"],
            params=params,
            immobile_income=raw.get("immobile_income"),
        )
    except KeyError as exc:
        raise InvalidEconomyError(f"economy file missing key {exc}") from exc


def with_params(econ: SpatialEconomy, sigma: float | None = None, mu: float | None = None) -> SpatialEconomy:
    """Copy of an economy with overridden structural parameters."""
    params = NegParameters(
        sigma=econ.params.sigma if sigma is None else sigma,
        mu=econ.params.mu if mu is None else mu,
    )
    return replace(econ, params=params)
