"""negpanel: regional wage-equilibrium simulation and panel econometrics.

The package has three layers: :mod:`negpanel.economy` solves the
regional wage/price-index fixed point, :mod:`negpanel.specs` turns
panel datasets into named regression designs, and :mod:`negpanel.panel`
estimates them (pooled OLS, absorbed fixed effects, GLS random effects)
with the full diagnostic set.  :mod:`negpanel.cli` wires everything
into reproducible command-line runs.
"""

from .data import (
    CSV_COLUMNS,
    PanelDataset,
    PanelObservation,
    PanelValidationReport,
    load_csv,
    save_csv,
    validate_panel,
)
from .economy import (
    EquilibriumState,
    NegParameters,
    SpatialEconomy,
    equilibrium_defect,
    income,
    load_economy,
    log_real_wage,
    nominal_wage_rhs,
    price_index,
    real_wage,
    solve_equilibrium,
)
from .panel import (
    DesignMatrix,
    FitResult,
    FixedEffects,
    HausmanResult,
    PanelIndex,
    PooledOLS,
    RandomEffects,
    durbin_watson,
    hausman_test,
    lsdv_fit,
    ols_fit,
    random_effects_fit,
    summarize_fit,
)
from .report import export_csv, load_results_csv, render_table
from .rng import XorShift64Star
from .specs import (
    SPEC_NAMES,
    RatioSet,
    aggregate_national,
    build_eq3,
    build_eq4,
    build_eq5,
    build_spec,
    build_weighted_alternative,
    compute_rl_ratios,
    spec_columns,
)
from .synthetic import SyntheticConfig, SyntheticTruth, drop_cells, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "CSV_COLUMNS",
    "PanelDataset",
    "PanelObservation",
    "PanelValidationReport",
    "load_csv",
    "save_csv",
    "validate_panel",
    "EquilibriumState",
    "NegParameters",
    "SpatialEconomy",
    "equilibrium_defect",
    "income",
    "load_economy",
    "log_real_wage",
    "nominal_wage_rhs",
    "price_index",
    "real_wage",
    "solve_equilibrium",
    "DesignMatrix",
    "FitResult",
    "FixedEffects",
    "HausmanResult",
    "PanelIndex",
    "PooledOLS",
    "RandomEffects",
    "durbin_watson",
    "hausman_test",
    "lsdv_fit",
    "ols_fit",
    "random_effects_fit",
    "summarize_fit",
    "export_csv",
    "load_results_csv",
    "render_table",
    "XorShift64Star",
    "SPEC_NAMES",
    "RatioSet",
    "aggregate_national",
    "build_eq3",
    "build_eq4",
    "build_eq5",
    "build_spec",
    "build_weighted_alternative",
    "compute_rl_ratios",
    "spec_columns",
    "SyntheticConfig",
    "SyntheticTruth",
    "drop_cells",
    "generate_synthetic",
    "__version__",
]
