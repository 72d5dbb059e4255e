"""Panel estimators: pooled OLS, dummy-absorbing fixed effects, GLS random effects.

The estimator classes follow the scikit-learn protocol (hyperparameters
in ``__init__``, ``fit`` returns ``self``, fitted state in ``result_``),
so they compose with ``get_params``/``set_params`` tooling.  The
module-level ``*_fit`` functions are one-call conveniences returning the
:class:`FitResult` directly.
"""

from __future__ import annotations

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator

from ..exceptions import AllWithinVariationZeroError, DesignError
from .design import DesignMatrix, FitResult, qr_least_squares
from .diagnostics import panel_durbin_watson

__all__ = [
    "PooledOLS",
    "FixedEffects",
    "RandomEffects",
    "ols_fit",
    "lsdv_fit",
    "random_effects_fit",
]

CONSTANT_NAME = "const"


def _squared_correlation(y: np.ndarray, fitted: np.ndarray) -> float:
    yc = y - y.mean()
    fc = fitted - fitted.mean()
    denom = float(yc @ yc) * float(fc @ fc)
    if denom <= 0.0:
        return 0.0
    r2 = float(yc @ fc) ** 2 / denom
    return min(r2, 1.0)


def _t_and_p(coef: np.ndarray, cov: np.ndarray, dof: int):
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    t = np.empty_like(coef)
    for i, (c, s) in enumerate(zip(coef, se)):
        if s > 0.0:
            t[i] = c / s
        else:
            t[i] = 0.0 if c == 0.0 else np.sign(c) * np.inf
    p = 2.0 * stats.t.sf(np.abs(t), dof)
    return t, np.clip(p, 0.0, 1.0)


def _with_intercept(design: DesignMatrix):
    """Regressor matrix with a leading constant column, unless one is named."""
    if CONSTANT_NAME in design.names:
        return design.regressors, design.names
    ones = np.ones((design.n_obs, 1))
    return np.hstack([ones, design.regressors]), (CONSTANT_NAME, *design.names)


def _group_codes(groups: np.ndarray):
    labels, codes = np.unique(groups, return_inverse=True)
    return labels, codes


def _group_means(values: np.ndarray, codes: np.ndarray, n_groups: int) -> np.ndarray:
    if values.ndim == 1:
        sums = np.bincount(codes, weights=values, minlength=n_groups)
    else:
        sums = np.column_stack(
            [np.bincount(codes, weights=values[:, j], minlength=n_groups) for j in range(values.shape[1])]
        )
    counts = np.bincount(codes, minlength=n_groups).astype(float)
    return (sums.T / counts).T if values.ndim == 2 else sums / counts


def _pack(
    estimator: str,
    design: DesignMatrix,
    names,
    coef,
    cov,
    dof,
    residuals,
    fitted,
    variance_components=None,
) -> FitResult:
    # residuals are on the estimation scale (demeaned/quasi-demeaned for the
    # absorbing estimators); fitted values are on the original scale
    y = design.response
    rss = float(residuals @ residuals)
    t, p = _t_and_p(coef, cov, dof)
    dw = panel_durbin_watson(residuals, design.units, design.periods, missing_ok=True)
    return FitResult(
        estimator=estimator,
        names=tuple(names),
        coefficients=coef,
        covariance=cov,
        t_stats=t,
        p_values=p,
        r_squared=_squared_correlation(y, fitted),
        durbin_watson=dw,
        residual_sd=float(np.sqrt(rss / dof)),
        dof=int(dof),
        n_obs=design.n_obs,
        spec_name=design.spec_name,
        variance_components=variance_components,
        residuals=residuals,
        fitted=fitted,
    )


def _pooled(design: DesignMatrix, add_intercept: bool) -> FitResult:
    y = design.response
    if add_intercept:
        x, names = _with_intercept(design)
    else:
        x, names = design.regressors, design.names
    beta, xtx_inv = qr_least_squares(x, y, names)
    fitted = x @ beta
    residuals = y - fitted
    dof = design.n_obs - len(names)
    if dof <= 0:
        raise DesignError("not enough observations for pooled OLS")
    sigma2 = float(residuals @ residuals) / dof
    cov = sigma2 * xtx_inv
    return _pack("pooled", design, names, beta, cov, dof, residuals, fitted)


def _nonconstant_columns(design: DesignMatrix):
    """Indices of columns with overall variation; constants are absorbed."""
    x = design.regressors
    keep = []
    for j in range(x.shape[1]):
        col = x[:, j]
        if np.ptp(col) > 1e-12 * (1.0 + np.max(np.abs(col))):
            keep.append(j)
    return keep


def _within_core(design: DesignMatrix, effects: str | None):
    """Demeaned response/regressors plus grouping metadata for absorbing fits."""
    groups = design.effect_groups(effects)
    if groups is None:
        raise DesignError("an absorbing fit needs an effects design other than 'none'")
    labels, codes = _group_codes(groups)
    n_groups = labels.size
    counts = np.bincount(codes, minlength=n_groups)
    if counts.max() < 2:
        raise DesignError("at least one unit must have two or more observations")

    keep = _nonconstant_columns(design)
    names = tuple(design.names[j] for j in keep)
    x = design.regressors[:, keep]
    y = design.response

    y_means = _group_means(y, codes, n_groups)
    x_means = _group_means(x, codes, n_groups) if keep else np.zeros((n_groups, 0))
    y_w = y - y_means[codes]
    x_w = x - x_means[codes, :]

    for j, name in enumerate(names):
        scale = 1.0 + float(np.max(np.abs(x[:, j])))
        if np.max(np.abs(x_w[:, j])) <= 1e-12 * scale:
            raise AllWithinVariationZeroError(name)
    return names, x, y, x_w, y_w, codes, n_groups, y_means, x_means


def _lsdv(design: DesignMatrix, effects: str | None) -> FitResult:
    names, x, y, x_w, y_w, codes, n_groups, y_means, x_means = _within_core(design, effects)
    if not names:
        raise DesignError("no regressor with within-unit variation")
    beta, xtx_inv = qr_least_squares(x_w, y_w, names)
    dof = design.n_obs - len(names) - n_groups
    if dof <= 0:
        raise DesignError("not enough observations for the absorbed dummies")
    resid_w = y_w - x_w @ beta
    sigma2 = float(resid_w @ resid_w) / dof
    cov = sigma2 * xtx_inv
    # group intercepts recovered from the means identity
    alpha = y_means - x_means @ beta
    fitted = alpha[codes] + x @ beta
    residuals = y - fitted
    return _pack("lsdv", design, names, beta, cov, dof, residuals, fitted)


def _harmonic_mean(values: np.ndarray) -> float:
    return values.size / float(np.sum(1.0 / values))


def _random_effects(design: DesignMatrix, effects: str | None) -> FitResult:
    names_w, _, y, x_w, y_w, codes, n_groups, y_means, x_means = _within_core(design, effects)
    if n_groups < 2:
        raise DesignError("random effects needs at least two units")
    n = design.n_obs
    k_w = len(names_w)

    dof_within = n - n_groups - k_w
    if dof_within <= 0:
        raise DesignError("not enough observations to estimate the error variance")
    beta_w = np.linalg.lstsq(x_w, y_w, rcond=None)[0]
    rss_w = float(np.sum((y_w - x_w @ beta_w) ** 2))
    sigma2_e = rss_w / dof_within

    # Swamy-Arora style components from the between regression, adapted to
    # unbalanced panels through the harmonic mean of the unit lengths.
    counts = np.bincount(codes, minlength=n_groups).astype(float)
    between_x = np.hstack([np.ones((n_groups, 1)), x_means])
    dof_between = n_groups - (k_w + 1)
    if dof_between > 0:
        beta_b = np.linalg.lstsq(between_x, y_means, rcond=None)[0]
        rss_b = float(np.sum((y_means - between_x @ beta_b) ** 2))
        sigma2_between = rss_b / dof_between
        sigma2_u = max(0.0, sigma2_between - sigma2_e / _harmonic_mean(counts))
    else:
        sigma2_u = 0.0

    if sigma2_e <= 0.0:
        theta = np.where(counts * sigma2_u > 0.0, 1.0, 0.0)
    else:
        theta = 1.0 - np.sqrt(sigma2_e / (counts * sigma2_u + sigma2_e))

    x_full, names = _with_intercept(design)
    x_means_full = _group_means(x_full, codes, n_groups)
    y_q = y - theta[codes] * y_means[codes]
    x_q = x_full - theta[codes, None] * x_means_full[codes, :]

    beta, xtx_inv = qr_least_squares(x_q, y_q, names)
    cov = sigma2_e * xtx_inv
    dof = n - len(names)
    fitted = x_full @ beta
    residuals = y_q - x_q @ beta
    return _pack(
        "random_effects",
        design,
        names,
        beta,
        cov,
        dof,
        residuals,
        fitted,
        variance_components=(float(sigma2_u), float(sigma2_e)),
    )


class _PanelRegressor(BaseEstimator):
    """Shared fit plumbing for the concrete estimators."""

    def fit(self, design: DesignMatrix, y=None):
        if not isinstance(design, DesignMatrix):
            raise DesignError("fit expects a DesignMatrix")
        self.result_ = self._fit_design(design)
        return self

    def fit_result(self, design: DesignMatrix) -> FitResult:
        return self.fit(design).result_

    def _fit_design(self, design: DesignMatrix) -> FitResult:  # pragma: no cover
        raise NotImplementedError


class PooledOLS(_PanelRegressor):
    """Ordinary least squares ignoring the panel structure.

    Parameters
    ----------
    add_intercept : bool
        Prepend a constant column unless one named ``const`` already
        exists in the design.
    """

    def __init__(self, add_intercept: bool = True):
        self.add_intercept = add_intercept

    def _fit_design(self, design: DesignMatrix) -> FitResult:
        return _pooled(design, self.add_intercept)

    def predict(self, design: DesignMatrix) -> np.ndarray:
        result = self.result_
        x = design.regressors
        if CONSTANT_NAME in result.names and CONSTANT_NAME not in design.names:
            x = np.hstack([np.ones((design.n_obs, 1)), x])
        return x @ result.coefficients


class FixedEffects(_PanelRegressor):
    """Least squares with absorbed group dummies (within transformation).

    Slope estimates are identical to explicit-dummy OLS; globally
    constant columns are absorbed into the dummies and reported columns
    shrink accordingly.

    Parameters
    ----------
    effects : str, optional
        Dummy design: ``unit``, ``region`` or ``industry``.  Defaults to
        the design matrix's own tag.
    """

    def __init__(self, effects: str | None = None):
        self.effects = effects

    def _fit_design(self, design: DesignMatrix) -> FitResult:
        return _lsdv(design, self.effects)


class RandomEffects(_PanelRegressor):
    """Feasible GLS with unit-level variance components.

    Components follow the Swamy-Arora idea: the error variance comes
    from the within regression, the unit-effect variance from the
    between regression, negative estimates truncated at zero (the fit
    then collapses to pooled OLS).  Quasi-demeaning uses the per-unit
    factor ``theta_i = 1 - sqrt(s2_e / (T_i s2_u + s2_e))``.

    Parameters
    ----------
    effects : str, optional
        Grouping that defines the "unit"; defaults to the design tag.
    """

    def __init__(self, effects: str | None = None):
        self.effects = effects

    def _fit_design(self, design: DesignMatrix) -> FitResult:
        return _random_effects(design, self.effects)

    def predict(self, design: DesignMatrix) -> np.ndarray:
        result = self.result_
        x = design.regressors
        if CONSTANT_NAME in result.names and CONSTANT_NAME not in design.names:
            x = np.hstack([np.ones((design.n_obs, 1)), x])
        return x @ result.coefficients


def ols_fit(design: DesignMatrix, add_intercept: bool = True) -> FitResult:
    """Pooled OLS on a design matrix."""
    return PooledOLS(add_intercept=add_intercept).fit_result(design)


def lsdv_fit(design: DesignMatrix, effects: str | None = None) -> FitResult:
    """Fixed-effects (dummy-absorbing) fit on a design matrix."""
    return FixedEffects(effects=effects).fit_result(design)


def random_effects_fit(design: DesignMatrix, effects: str | None = None) -> FitResult:
    """Random-effects GLS fit on a design matrix."""
    return RandomEffects(effects=effects).fit_result(design)
