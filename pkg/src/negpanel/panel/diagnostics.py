"""Fit diagnostics: panel Durbin-Watson, Hausman contrast, significance markers."""

from __future__ import annotations

import numpy as np
from scipy import stats

from ..exceptions import NameMismatchError, NoConsecutivePairsError
from .design import FitResult, HausmanResult

__all__ = [
    "residual_runs",
    "durbin_watson",
    "panel_durbin_watson",
    "hausman_test",
    "summarize_fit",
]

# eigenvalues of the contrast covariance below -NEG_EIG_RTOL * ||V|| mark
# an invalid (non-PSD) Hausman contrast
NEG_EIG_RTOL = 1e-10


def residual_runs(residuals, units, periods) -> list[np.ndarray]:
    """Split residuals into maximal runs of consecutive periods within a unit.

    A new run starts at every unit change and at every period gap, so
    differences are never taken across unit boundaries or missing years.
    """
    resid = np.asarray(residuals, dtype=float)
    units = np.asarray(units)
    periods = np.asarray(periods, dtype=int)
    order = np.lexsort((periods, units))
    runs: list[np.ndarray] = []
    current: list[float] = []
    prev_unit = None
    prev_period = None
    for i in order:
        unit, period = units[i], periods[i]
        if current and (unit != prev_unit or period != prev_period + 1):
            runs.append(np.array(current))
            current = []
        current.append(resid[i])
        prev_unit, prev_period = unit, period
    if current:
        runs.append(np.array(current))
    return runs


def durbin_watson(sequences) -> float:
    """Durbin-Watson statistic over ordered residual sequences.

    Numerator pairs are adjacent elements within each sequence; the
    denominator sums the squares of every residual passed in.  Raises
    :class:`NoConsecutivePairsError` when no sequence has length two.
    """
    num = 0.0
    den = 0.0
    pairs = 0
    for seq in sequences:
        arr = np.asarray(seq, dtype=float)
        den += float(arr @ arr)
        if arr.size >= 2:
            d = np.diff(arr)
            num += float(d @ d)
            pairs += arr.size - 1
    if pairs == 0:
        raise NoConsecutivePairsError("no unit contributes two consecutive residuals")
    if den == 0.0:
        return 0.0
    return num / den


def panel_durbin_watson(residuals, units, periods, missing_ok: bool = False) -> float:
    """Durbin-Watson over consecutive within-unit pairs of a fitted panel."""
    try:
        return durbin_watson(residual_runs(residuals, units, periods))
    except NoConsecutivePairsError:
        if missing_ok:
            return float("nan")
        raise


def hausman_test(fe: FitResult, re: FitResult, common=None) -> HausmanResult:
    """Contrast test between fixed- and random-effects slope estimates.

    ``H = q' (V_fe - V_re)^+ q`` with q the coefficient difference over
    the named slopes (intercept excluded by default) and a symmetric
    eigenvalue pseudo-inverse.  When the contrast covariance has
    negative eigenvalues beyond tolerance the raw quadratic form is
    reported with ``valid=False`` instead of being clamped.
    """
    if common is None:
        common = [n for n in fe.names if n in re.names and n != "const"]
    common = list(common)
    if not common:
        raise NameMismatchError("no common slope coefficients to contrast")
    for name in common:
        if name not in fe.names or name not in re.names:
            raise NameMismatchError(f"coefficient {name!r} missing from one of the fits")

    i_fe = [fe.names.index(n) for n in common]
    i_re = [re.names.index(n) for n in common]
    q = fe.coefficients[i_fe] - re.coefficients[i_re]
    v = fe.covariance[np.ix_(i_fe, i_fe)] - re.covariance[np.ix_(i_re, i_re)]
    v = 0.5 * (v + v.T)

    eigvals, eigvecs = np.linalg.eigh(v)
    scale = float(np.max(np.abs(eigvals))) if eigvals.size else 0.0
    valid = scale == 0.0 or float(eigvals.min()) >= -NEG_EIG_RTOL * scale
    inv_eig = np.where(np.abs(eigvals) > 1e-12 * scale, 1.0 / np.where(eigvals != 0, eigvals, 1.0), 0.0)
    statistic = float(q @ (eigvecs * inv_eig) @ (eigvecs.T @ q))
    dof = len(common)
    p_value = float(stats.chi2.sf(statistic, dof)) if statistic > 0 else 1.0
    return HausmanResult(statistic=statistic, dof=dof, p_value=p_value, valid=valid)


def summarize_fit(fit: FitResult, alpha_levels: tuple[float, float] = (0.05, 0.10)) -> tuple[str, ...]:
    """Per-coefficient significance markers.

    ``*`` flags p below the first level, ``**`` flags p in between the
    two levels, the empty string everything else (two-sided p-values
    from the t distribution with the fit's residual dof).
    """
    strict, loose = alpha_levels
    if not 0.0 < strict < loose < 1.0:
        raise ValueError("alpha levels must satisfy 0 < strict < loose < 1")
    markers = []
    for p in fit.p_values:
        if p < strict:
            markers.append("*")
        elif p < loose:
            markers.append("**")
        else:
            markers.append("")
    return tuple(markers)
