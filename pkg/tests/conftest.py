import numpy as np
import pytest

from negpanel import SyntheticConfig, drop_cells, generate_synthetic
from negpanel.panel import DesignMatrix

# generating values for the shared eq4 fixture (slopes deliberately match
# the coefficient-recovery acceptance target)
EQ4_SLOPES = {
    "lnY_rt": 0.098,
    "lnT_rpt": 0.559,
    "lnG_rt": -0.624,
    "lnλ_rt": -0.155,
    "lnw_rt": 0.619,
    "lnT_prt": -0.411,
}
EQ4_TRUTH = {"const": 1.5, **EQ4_SLOPES}


def make_design(
    rng,
    n_units=30,
    n_periods=6,
    k=2,
    effect_sd=0.0,
    noise_sd=1.0,
    beta=None,
    unit_corr=0.0,
    missing_rate=0.0,
    const=1.0,
    effects="unit",
):
    """Generic unbalanced panel design with known slopes, for estimator tests."""
    if beta is None:
        beta = np.linspace(0.5, -0.5, k)
    beta = np.asarray(beta, dtype=float)
    unit_effects = rng.normal(0.0, effect_sd, n_units) if effect_sd > 0 else np.zeros(n_units)
    rows, units, periods, ys = [], [], [], []
    for i in range(n_units):
        kept = 0
        for t in range(n_periods):
            if missing_rate and rng.uniform() < missing_rate and kept > 0:
                continue
            x = rng.normal(0.0, 1.0, k) + unit_corr * unit_effects[i]
            rows.append(x)
            units.append(f"u{i:03d}")
            periods.append(2000 + t)
            ys.append(const + x @ beta + unit_effects[i] + rng.normal(0.0, noise_sd))
            kept += 1
    design = DesignMatrix(
        response=np.array(ys),
        regressors=np.array(rows),
        names=tuple(f"x{j}" for j in range(k)),
        units=np.array(units),
        periods=np.array(periods),
        effects=effects,
    )
    return design, beta


def dummy_ols_slopes(design, slope_names):
    """Independent fixed-effects route: explicit unit dummies + lstsq."""
    labels, codes = np.unique(design.units, return_inverse=True)
    dummies = np.zeros((design.n_obs, labels.size))
    dummies[np.arange(design.n_obs), codes] = 1.0
    idx = [design.names.index(n) for n in slope_names]
    x = np.hstack([design.regressors[:, idx], dummies])
    beta = np.linalg.lstsq(x, design.response, rcond=None)[0]
    return beta[: len(idx)]


@pytest.fixture(scope="session")
def eq4_fixture_302():
    """5x9x8 grid generated from the eq4 truth, thinned to exactly 302 rows."""
    cfg = SyntheticConfig(
        true_coefficients=EQ4_TRUTH,
        effect_sd=0.3,
        noise_sd=0.15,
        seed=7,
    )
    data, truth = generate_synthetic(cfg, "eq4")
    data = drop_cells(data, 58, seed=3, protect_region="R01")
    assert data.n_obs == 302
    return data, truth


@pytest.fixture(scope="session")
def eq4_csv_302(eq4_fixture_302, tmp_path_factory):
    from negpanel import save_csv

    data, _ = eq4_fixture_302
    path = tmp_path_factory.mktemp("fixture") / "panel302.csv"
    save_csv(data, path)
    return path
