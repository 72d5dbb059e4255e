"""Unbalanced-panel estimators and diagnostics."""

from .design import (
    EFFECTS_DESIGNS,
    DesignMatrix,
    FitResult,
    HausmanResult,
    PanelIndex,
    qr_least_squares,
)
from .diagnostics import (
    durbin_watson,
    hausman_test,
    panel_durbin_watson,
    residual_runs,
    summarize_fit,
)
from .estimators import (
    FixedEffects,
    PooledOLS,
    RandomEffects,
    lsdv_fit,
    ols_fit,
    random_effects_fit,
)

__all__ = [
    "EFFECTS_DESIGNS",
    "DesignMatrix",
    "FitResult",
    "HausmanResult",
    "PanelIndex",
    "qr_least_squares",
    "durbin_watson",
    "hausman_test",
    "panel_durbin_watson",
    "residual_runs",
    "summarize_fit",
    "FixedEffects",
    "PooledOLS",
    "RandomEffects",
    "lsdv_fit",
    "ols_fit",
    "random_effects_fit",
]
