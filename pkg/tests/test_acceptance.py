"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from negpanel import (
    NegParameters,
    SpatialEconomy,
    SyntheticConfig,
    build_eq4,
    build_weighted_alternative,
    drop_cells,
    durbin_watson,
    generate_synthetic,
    hausman_test,
    log_real_wage,
    lsdv_fit,
    nominal_wage_rhs,
    ols_fit,
    price_index,
    random_effects_fit,
    real_wage,
    save_csv,
    solve_equilibrium,
)
from negpanel.cli import main
from negpanel.panel import DesignMatrix, FitResult

from conftest import EQ4_TRUTH, make_design


def report(number: int, label: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"acceptance criterion {number} [{label}]: {status}{suffix}")
    assert ok, f"criterion {number} ({label}) failed{suffix}"


def plain_fixed_point_oracle(income, labor, transport, sigma, mu, sweeps=200_000, tol=1e-14):
    """Independent brute-force solver: plain loops, undamped, normalized at the end."""
    n = len(income)
    w = [1.0] * n
    g = [1.0] * n
    for _ in range(sweeps):
        g = [
            sum(labor[s] * (w[s] * transport[s][r]) ** (1.0 - sigma) for s in range(n))
            ** (1.0 / (1.0 - sigma))
            for r in range(n)
        ]
        w_new = [
            sum(income[s] * transport[r][s] ** (1.0 - sigma) * g[s] ** (sigma - 1.0) for s in range(n))
            ** (1.0 / sigma)
            for r in range(n)
        ]
        diff = max(abs(a - b) / b for a, b in zip(w_new, w))
        w = w_new
        if diff < tol:
            break
    scale = sum(l * x for l, x in zip(labor, w)) / sum(labor)
    w = [x / scale for x in w]
    g = [x / scale for x in g]
    omega = [w[r] * g[r] ** (-mu) for r in range(n)]
    return w, g, omega


def test_criterion_1_equilibrium_correctness():
    start = time.time()

    sym = SpatialEconomy(
        regions=("L", "R"),
        income=[1.0, 1.0],
        labor=[0.5, 0.5],
        transport=[[1.0, 1.6], [1.6, 1.0]],
        params=NegParameters(sigma=5.0, mu=0.4),
    )
    state = solve_equilibrium(sym)
    sym_ok = abs(state.real_wage[0] - state.real_wage[1]) / state.real_wage[0] <= 1e-8

    rng = np.random.default_rng(2)
    free_ok = True
    for _ in range(5):
        n = int(rng.integers(2, 6))
        econ = SpatialEconomy(
            regions=tuple(f"r{i}" for i in range(n)),
            income=rng.uniform(0.5, 2.0, n),
            labor=rng.uniform(0.2, 1.5, n),
            transport=np.ones((n, n)),
            params=NegParameters(sigma=4.0, mu=0.3),
        )
        s = solve_equilibrium(econ)
        free_ok &= float(np.ptp(s.real_wage) / s.real_wage.min()) <= 1e-8

    income = [1.2, 0.8, 1.5]
    labor = [0.5, 0.2, 0.3]
    transport = [[1.0, 1.4, 1.8], [1.5, 1.0, 1.6], [1.7, 1.3, 1.0]]
    econ3 = SpatialEconomy(
        regions=("A", "B", "C"),
        income=income,
        labor=labor,
        transport=transport,
        params=NegParameters(sigma=4.0, mu=0.3),
    )
    solved = solve_equilibrium(econ3, tol=1e-12)
    w_oracle, g_oracle, omega_oracle = plain_fixed_point_oracle(income, labor, transport, 4.0, 0.3)
    oracle_ok = bool(
        np.allclose(solved.nominal_wage, w_oracle, rtol=1e-8)
        and np.allclose(solved.price_index, g_oracle, rtol=1e-8)
        and np.allclose(solved.real_wage, omega_oracle, rtol=1e-8)
    )

    elapsed = time.time() - start
    report(
        1,
        "equilibrium correctness",
        sym_ok and free_ok and oracle_ok and elapsed < 1.0,
        f"sym={sym_ok} free={free_ok} oracle={oracle_ok} {elapsed:.2f}s",
    )


def test_criterion_2_reduced_and_log_forms_agree():
    from negpanel.economy import access_bracket, cost_bracket

    rng = np.random.default_rng(3)
    worst = 0.0
    draws = 0
    while draws < 1000:
        n = int(rng.integers(2, 5))
        params = NegParameters(sigma=float(rng.uniform(1.3, 8.0)), mu=float(rng.uniform(0.05, 0.95)))
        t = np.ones((n, n)) + rng.uniform(0.0, 2.0, (n, n))
        np.fill_diagonal(t, 1.0)
        econ = SpatialEconomy(
            regions=tuple(f"r{i}" for i in range(n)),
            income=rng.uniform(0.3, 3.0, n),
            labor=rng.uniform(0.2, 2.0, n),
            transport=t,
            params=params,
        )
        wages = rng.uniform(0.3, 3.0, n)
        g = rng.uniform(0.3, 3.0, n)
        b1 = access_bracket(econ, g)
        b2 = cost_bracket(econ, wages)
        for r in range(n):
            reduced = real_wage(nominal_wage_rhs(econ, g, r), price_index(econ, wages, r), params)
            log_form = math.exp(log_real_wage(b1[r], b2[r], params))
            worst = max(worst, abs(log_form - reduced) / reduced)
            draws += 1
    report(2, "reduced/log-linear agreement", worst <= 1e-10, f"{draws} draws, worst rel {worst:.2e}")


def test_criterion_3_lsdv_matches_dummy_route():
    start = time.time()
    rng = np.random.default_rng(4)
    worst = 0.0
    panels = 0

    def check(design):
        nonlocal worst
        fit = lsdv_fit(design)
        labels, codes = np.unique(design.units, return_inverse=True)
        dummies = np.zeros((design.n_obs, labels.size))
        dummies[np.arange(design.n_obs), codes] = 1.0
        idx = [design.names.index(n) for n in fit.names]
        x = np.hstack([design.regressors[:, idx], dummies])
        beta = np.linalg.lstsq(x, design.response, rcond=None)[0][: len(idx)]
        rel = np.max(np.abs(beta - fit.coefficients) / np.maximum(np.abs(fit.coefficients), 1e-12))
        worst = max(worst, float(rel))

    for _ in range(80):
        design, _ = make_design(
            rng,
            n_units=int(rng.integers(5, 40)),
            n_periods=int(rng.integers(3, 9)),
            k=int(rng.integers(1, 4)),
            effect_sd=1.0,
            missing_rate=float(rng.uniform(0.0, 0.3)),
        )
        check(design)
        panels += 1

    for seed in range(20):
        cfg = SyntheticConfig(
            true_coefficients=EQ4_TRUTH, effect_sd=0.3, noise_sd=0.15, seed=100 + seed
        )
        data, _ = generate_synthetic(cfg, "eq4")
        data = drop_cells(data, 58, seed=seed, protect_region="R01")
        assert data.n_obs == 302
        check(build_eq4(data))
        panels += 1

    elapsed = time.time() - start
    report(
        3,
        "LSDV equals within transformation",
        worst <= 1e-8 and panels == 100 and elapsed < 10.0,
        f"{panels} panels, worst rel {worst:.2e}, {elapsed:.2f}s",
    )


def test_criterion_4_coefficient_recovery():
    start = time.time()
    slopes = {k: v for k, v in EQ4_TRUTH.items() if k != "const"}
    reps = 200
    covered = {name: 0 for name in slopes}
    for rep in range(reps):
        cfg = SyntheticConfig(
            true_coefficients=EQ4_TRUTH,
            effect_sd=0.3,
            noise_sd=0.15,
            missing_rate=58.0 / 360.0,
            seed=1000 + rep,
        )
        data, _ = generate_synthetic(cfg, "eq4")
        fit = lsdv_fit(build_eq4(data))
        crit = stats.t.ppf(0.975, fit.dof)
        for name, value in slopes.items():
            i = fit.names.index(name)
            se = math.sqrt(fit.covariance[i, i])
            covered[name] += abs(fit.coefficients[i] - value) <= crit * se
    elapsed = time.time() - start
    rates = {name: c / reps for name, c in covered.items()}
    ok = all(c >= 0.90 * reps for c in covered.values()) and elapsed < 60.0
    report(
        4,
        "95% intervals cover generating coefficients",
        ok,
        f"coverage {min(rates.values()):.3f}..{max(rates.values()):.3f}, {elapsed:.1f}s",
    )


def test_criterion_5_hausman_behavior():
    import dataclasses

    rng = np.random.default_rng(5)
    design, _ = make_design(rng, n_units=20, n_periods=6, k=2, effect_sd=0.5)
    fe = lsdv_fit(design)
    fake_re = dataclasses.replace(fe, estimator="random_effects")
    identical = hausman_test(fe, fake_re)
    identical_ok = identical.statistic == 0.0 and identical.p_value == 1.0

    def scalar_fit(coef, var, estimator):
        return FitResult(
            estimator=estimator,
            names=("x",),
            coefficients=np.array([coef]),
            covariance=np.array([[var]]),
            t_stats=np.array([coef / math.sqrt(var)]),
            p_values=np.array([0.05]),
            r_squared=0.5,
            durbin_watson=2.0,
            residual_sd=1.0,
            dof=10,
            n_obs=11,
        )

    scalar = hausman_test(scalar_fit(1.0, 0.5, "lsdv"), scalar_fit(0.5, 0.25, "random_effects"))
    scalar_ok = scalar.statistic == 1.0 and scalar.dof == 1

    rejections = 0
    for _ in range(100):
        d, _ = make_design(
            rng, n_units=45, n_periods=8, k=2, effect_sd=1.0, unit_corr=0.7, noise_sd=0.5
        )
        h = hausman_test(lsdv_fit(d), random_effects_fit(d))
        rejections += h.valid and h.p_value < 0.05
    power_ok = rejections >= 80

    report(
        5,
        "Hausman contrast behavior",
        identical_ok and scalar_ok and power_ok,
        f"identical={identical_ok} scalar={scalar_ok} rejections={rejections}/100",
    )


def test_criterion_6_diagnostics():
    dw_constant = durbin_watson([np.full(8, 1.3)])
    constant_ok = dw_constant == 0.0

    dw_alternating = durbin_watson([np.array([1.0, -1.0, 1.0, -1.0])])
    alternating_ok = dw_alternating == pytest.approx(3.0, abs=1e-14)

    rng = np.random.default_rng(6)
    dw_normal = durbin_watson([rng.normal(size=10_000)])
    normal_ok = 1.9 <= dw_normal <= 2.1

    x = np.linspace(1.0, 4.0, 12).reshape(-1, 1)
    exact = ols_fit(
        DesignMatrix(
            response=2.0 * x[:, 0],
            regressors=x,
            names=("x",),
            units=np.array([f"u{i}" for i in range(12)]),
            periods=np.full(12, 2000),
            effects="none",
        )
    )
    r2_ok = exact.r_squared == pytest.approx(1.0, abs=1e-12)

    report(
        6,
        "diagnostic statistics",
        constant_ok and alternating_ok and normal_ok and r2_ok,
        f"dw_const={dw_constant} dw_alt={dw_alternating} dw_normal={dw_normal:.3f} r2={exact.r_squared}",
    )


def test_criterion_7_structural_reproduction(tmp_path, capsys):
    cfg = SyntheticConfig(true_coefficients=EQ4_TRUTH, effect_sd=0.3, noise_sd=0.15, seed=7)
    data, _ = generate_synthetic(cfg, "eq4")
    data = drop_cells(data, 58, seed=3, protect_region="R01")
    assert data.n_obs == 302
    csv_path = tmp_path / "panel302.csv"
    save_csv(data, csv_path)

    all_ok = True
    details = []
    for spec in ("eq3", "eq3p", "eq4", "eq5", "eq5p"):
        args = [
            "estimate",
            "--data", str(csv_path),
            "--spec", spec,
            "--estimators", "lsdv,re",
            "--leader", "R01",
            "--include-leader",
            "--out", str(tmp_path / f"out_{spec}"),
        ]
        code_a = main(list(args))
        out_a = capsys.readouterr().out
        table_a = (tmp_path / f"out_{spec}" / f"{spec}_table.txt").read_bytes()
        csv_a = (tmp_path / f"out_{spec}" / f"{spec}_results.csv").read_bytes()
        code_b = main(list(args))
        out_b = capsys.readouterr().out
        table_b = (tmp_path / f"out_{spec}" / f"{spec}_table.txt").read_bytes()
        csv_b = (tmp_path / f"out_{spec}" / f"{spec}_results.csv").read_bytes()

        stable = code_a == code_b == 0 and out_a == out_b and table_a == table_b and csv_a == csv_b

        lines = out_a.splitlines()
        blocks = sum(1 for line in lines if line.strip().startswith("Coefficients"))
        tstats = sum(1 for line in lines if line.strip().startswith("T-stat."))
        signif = sum(1 for line in lines if line.strip().startswith("Signif. level"))
        triplets = blocks == tstats == signif == 2  # one per estimator
        footer = (
            any("Degrees of freedom" in line for line in lines)
            and any(line.startswith("Number of observations  302 - 302") for line in lines)
            and any("Residual std. dev." in line for line in lines)
            and any("Hausman statistic" in line for line in lines)
        )
        ok = stable and triplets and footer
        all_ok &= ok
        details.append(f"{spec}:{'ok' if ok else 'BAD'}")

    report(7, "table structure reproduction", all_ok, " ".join(details))


def test_criterion_8_weighted_alternative_oracle():
    rng = np.random.default_rng(8)
    worst = 0.0

    for _ in range(15):
        n_units = int(rng.integers(8, 25))
        n_periods = int(rng.integers(3, 7))
        design, _ = make_design(rng, n_units=n_units, n_periods=n_periods, k=3, effect_sd=0.5)
        with_const = DesignMatrix(
            response=design.response,
            regressors=np.hstack([np.ones((design.n_obs, 1)), design.regressors]),
            names=("const",) + design.names,
            units=design.units,
            periods=design.periods,
            effects=design.effects,
        )
        weights = rng.uniform(0.2, 3.0, design.n_obs)
        fit = ols_fit(build_weighted_alternative(with_const, weights))
        oracle = np.linalg.lstsq(
            with_const.regressors * weights[:, None], with_const.response * weights, rcond=None
        )[0]
        worst = max(worst, float(np.max(np.abs(oracle - fit.coefficients))))

    for seed in range(5):
        cfg = SyntheticConfig(true_coefficients=EQ4_TRUTH, effect_sd=0.3, noise_sd=0.2, seed=50 + seed)
        data, _ = generate_synthetic(cfg, "eq4")
        base = build_eq4(data)
        from negpanel.specs import weights_for_design, weights_region_in_industry

        weights = weights_for_design(base, weights_region_in_industry(data))
        fit = ols_fit(build_weighted_alternative(base, weights))
        oracle = np.linalg.lstsq(
            base.regressors * weights[:, None], base.response * weights, rcond=None
        )[0]
        worst = max(worst, float(np.max(np.abs(oracle - fit.coefficients))))

    report(8, "weighted fit equals row-scaling oracle", worst <= 1e-10, f"worst abs diff {worst:.2e}")
