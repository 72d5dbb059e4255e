"""Design-matrix and result containers for the panel estimators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from ..exceptions import DesignError, RankDeficientError

__all__ = [
    "EFFECTS_DESIGNS",
    "PanelIndex",
    "DesignMatrix",
    "FitResult",
    "HausmanResult",
    "qr_least_squares",
]

EFFECTS_DESIGNS = ("none", "unit", "region", "industry")

# relative tolerance for pivoted-QR rank decisions
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class PanelIndex:
    """Position of one observation: cross-section unit and period."""

    unit: str
    period: int


def _row_array(name: str, values, n: int, dtype=None) -> np.ndarray:
    arr = np.asarray(values) if dtype is None else np.asarray(values, dtype=dtype)
    if arr.shape != (n,):
        raise DesignError(f"{name} must have length {n}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class DesignMatrix:
    """Response, regressors and panel index for one regression sample.

    Rows are sorted by (unit, period) at construction, so identical
    inputs always produce byte-identical layouts.  ``effects`` names the
    default dummy design an absorbing estimator should use; ``regions``
    and ``industries`` are optional per-row labels enabling the region
    and industry designs.  ``dropped`` records observations excluded at
    build time as (region, industry, year, column) tuples.
    """

    response: np.ndarray
    regressors: np.ndarray
    names: tuple[str, ...]
    units: np.ndarray
    periods: np.ndarray
    effects: str = "unit"
    regions: np.ndarray | None = None
    industries: np.ndarray | None = None
    spec_name: str = ""
    dropped: tuple = ()

    def __post_init__(self):
        y = np.asarray(self.response, dtype=float)
        x = np.asarray(self.regressors, dtype=float)
        if y.ndim != 1:
            raise DesignError("response must be one-dimensional")
        n = y.size
        if x.ndim != 2 or x.shape[0] != n:
            raise DesignError(f"regressors must be ({n}, k), got {x.shape}")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise DesignError("design contains non-finite entries")
        names = tuple(str(v) for v in self.names)
        if len(names) != x.shape[1]:
            raise DesignError(f"{x.shape[1]} columns but {len(names)} names")
        if len(set(names)) != len(names):
            raise DesignError("column names must be unique")
        if self.effects not in EFFECTS_DESIGNS:
            raise DesignError(f"unknown effects design {self.effects!r}")

        units = _row_array("units", self.units, n).astype(str)
        periods = _row_array("periods", self.periods, n, dtype=int)
        regions = None if self.regions is None else _row_array("regions", self.regions, n).astype(str)
        industries = (
            None if self.industries is None else _row_array("industries", self.industries, n).astype(str)
        )

        order = np.lexsort((periods, units))
        y = y[order].copy()
        x = x[order].copy()
        units = units[order].copy()
        periods = periods[order].copy()
        if regions is not None:
            regions = regions[order].copy()
        if industries is not None:
            industries = industries[order].copy()

        keys = list(zip(units.tolist(), periods.tolist()))
        if len(set(keys)) != n:
            raise DesignError("(unit, period) pairs must be unique")

        n_dummies = 0
        if self.effects != "none":
            groups = {"unit": units, "region": regions, "industry": industries}[self.effects]
            if groups is not None:
                n_dummies = len(set(groups.tolist()))
        if n <= len(names) + n_dummies:
            raise DesignError(
                f"need more than {len(names) + n_dummies} observations, have {n}"
            )

        for arr in (y, x, units, periods, regions, industries):
            if arr is not None:
                arr.setflags(write=False)
        object.__setattr__(self, "response", y)
        object.__setattr__(self, "regressors", x)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "industries", industries)
        object.__setattr__(self, "dropped", tuple(self.dropped))

    @property
    def n_obs(self) -> int:
        return self.response.size

    @property
    def n_regressors(self) -> int:
        return len(self.names)

    @property
    def index(self) -> tuple[PanelIndex, ...]:
        return tuple(
            PanelIndex(unit=u, period=int(p))
            for u, p in zip(self.units.tolist(), self.periods.tolist())
        )

    def effect_groups(self, effects: str | None = None) -> np.ndarray | None:
        """Per-row group labels for the requested (or default) effects design."""
        tag = self.effects if effects is None else effects
        if tag not in EFFECTS_DESIGNS:
            raise DesignError(f"unknown effects design {tag!r}")
        if tag == "none":
            return None
        source = {"unit": self.units, "region": self.regions, "industry": self.industries}[tag]
        if source is None:
            raise DesignError(f"design carries no {tag} labels")
        return source

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.names.index(name)
        except ValueError:
            raise DesignError(f"no column named {name!r}") from None
        return self.regressors[:, j]


@dataclass(frozen=True)
class FitResult:
    """Coefficients and diagnostics from one estimator run.

    ``dof`` is ``n_obs`` minus the number of estimated mean parameters
    (slopes plus intercept or absorbed dummies); ``residual_sd`` is the
    dof-adjusted residual standard deviation sqrt(RSS / dof);
    ``durbin_watson`` may be NaN when no unit contributes two
    consecutive periods.
    """

    estimator: str
    names: tuple[str, ...]
    coefficients: np.ndarray
    covariance: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    r_squared: float
    durbin_watson: float
    residual_sd: float
    dof: int
    n_obs: int
    spec_name: str = ""
    variance_components: tuple[float, float] | None = None
    residuals: np.ndarray | None = None
    fitted: np.ndarray | None = None

    def __post_init__(self):
        k = len(self.names)
        coef = np.asarray(self.coefficients, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        t = np.asarray(self.t_stats, dtype=float)
        p = np.asarray(self.p_values, dtype=float)
        if coef.shape != (k,) or t.shape != (k,) or p.shape != (k,):
            raise DesignError("coefficient vectors must match the number of names")
        if cov.shape != (k, k):
            raise DesignError(f"covariance must be {k}x{k}")
        se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
        with np.errstate(invalid="ignore"):
            ok = se > 0
            if np.any(np.abs(t[ok] * se[ok] - coef[ok]) > 1e-10 * (1.0 + np.abs(coef[ok]))):
                raise DesignError("t statistics inconsistent with coefficients and covariance")
        if np.any((p < 0) | (p > 1)):
            raise DesignError("p-values must lie in [0, 1]")
        if not -1e-12 <= self.r_squared <= 1.0 + 1e-12:
            raise DesignError(f"r_squared out of [0, 1]: {self.r_squared}")
        if np.isfinite(self.durbin_watson) and not -1e-12 <= self.durbin_watson <= 4.0 + 1e-12:
            raise DesignError(f"durbin_watson out of [0, 4]: {self.durbin_watson}")
        if not 0 < self.dof < self.n_obs:
            raise DesignError(f"dof must lie in (0, n_obs), got {self.dof}")
        for attr, value in (("coefficients", coef), ("covariance", cov), ("t_stats", t), ("p_values", p)):
            value = value.copy()
            value.setflags(write=False)
            object.__setattr__(self, attr, value)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n_mean_parameters(self) -> int:
        return self.n_obs - self.dof

    @property
    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.diag(self.covariance))

    def coefficient(self, name: str) -> float:
        try:
            return float(self.coefficients[self.names.index(name)])
        except ValueError:
            raise DesignError(f"no coefficient named {name!r}") from None


@dataclass(frozen=True)
class HausmanResult:
    """Contrast statistic between fixed- and random-effects estimates.

    ``valid`` is False when the contrast covariance has negative
    eigenvalues beyond tolerance; the raw quadratic form is still
    reported in that case.
    """

    statistic: float
    dof: int
    p_value: float
    valid: bool


def qr_least_squares(x: np.ndarray, y: np.ndarray, names: Sequence[str]):
    """Least squares via column-pivoted QR with rank detection.

    Returns ``(beta, xtx_inv)``; raises :class:`RankDeficientError`
    naming the pivoted-out columns when the matrix is rank deficient at
    relative tolerance ``RANK_RTOL``.
    """
    n, k = x.shape
    q, r, piv = scipy.linalg.qr(x, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0:
        raise DesignError("empty regressor matrix")
    rank = int(np.sum(diag > RANK_RTOL * diag[0])) if diag[0] > 0 else 0
    if rank < k:
        raise RankDeficientError([str(names[j]) for j in piv[rank:]])
    beta_piv = scipy.linalg.solve_triangular(r, q.T @ y)
    r_inv = scipy.linalg.solve_triangular(r, np.eye(k))
    cov_piv = r_inv @ r_inv.T
    beta = np.empty(k)
    beta[piv] = beta_piv
    xtx_inv = np.empty((k, k))
    xtx_inv[np.ix_(piv, piv)] = cov_piv
    xtx_inv = 0.5 * (xtx_inv + xtx_inv.T)
    return beta, xtx_inv
