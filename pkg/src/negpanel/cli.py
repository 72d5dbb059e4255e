"""Command-line entry point: simulate, estimate, synth and report subcommands.

Runs are reproducible: every option can come from a flat ``key = value``
config file (flags override file values), and each output starts with a
header carrying a hash of the resolved configuration plus the seed.
Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import economy as econ_mod
from .data import load_csv, save_csv, validate_panel
from .exceptions import NegPanelError
from .panel import FitResult, hausman_test, lsdv_fit, ols_fit, random_effects_fit
from .report import export_csv, load_results_csv, render_table
from .specs import SPEC_NAMES, build_spec, spec_columns, spec_description
from .synthetic import SyntheticConfig, generate_synthetic

__all__ = ["main", "run", "RunConfig"]

_ESTIMATOR_ALIASES = {
    "pooled": "pooled",
    "ols": "pooled",
    "lsdv": "lsdv",
    "fe": "lsdv",
    "within": "lsdv",
    "re": "random_effects",
    "random": "random_effects",
    "random_effects": "random_effects",
}

_FITTERS = {
    "pooled": ols_fit,
    "lsdv": lsdv_fit,
    "random_effects": random_effects_fit,
}

# cycled over a spec's columns when no explicit truth is configured
_DEFAULT_COEFFICIENTS = (0.6, -0.4, 0.3, -0.2, 0.5, -0.3, 0.25, -0.15, 0.35)


@dataclass
class RunConfig:
    """Resolved options of one CLI run."""

    command: str
    economy: str | None = None
    data: str | None = None
    spec: str = "eq4"
    estimators: tuple[str, ...] = ("lsdv", "random_effects")
    effects: str = "unit"
    leader: str | None = None
    include_leader: bool = False
    sigma: float | None = None
    mu: float | None = None
    damping: float = 0.5
    tol: float = 1e-10
    max_iter: int = 10_000
    endogenous_income: bool = False
    seed: int | None = None
    out: str | None = None
    results: str | None = None
    dims: tuple[int, int, int] = (5, 9, 8)
    missing_rate: float = 0.0
    effect_sd: float = 0.3
    noise_sd: float = 0.15
    coefficients: dict[str, float] | None = None

    def hash(self) -> str:
        pairs = []
        for key, value in sorted(vars(self).items()):
            if isinstance(value, dict):
                value = json.dumps(value, sort_keys=True)
            pairs.append(f"{key}={value}")
        return hashlib.sha256("\n".join(pairs).encode("utf-8")).hexdigest()[:12]

    def header(self) -> str:
        seed = "none" if self.seed is None else str(self.seed)
        return f"# config-hash: {self.hash()}  seed: {seed}"


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config_file(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file; '#' starts a comment."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _parse_dims(text: str) -> tuple[int, int, int]:
    parts = text.lower().replace("x", ",").split(",")
    if len(parts) != 3:
        raise ValueError(f"dims must look like 5x9x8, got {text!r}")
    r, i, t = (int(p) for p in parts)
    return (r, i, t)


def _parse_estimators(text: str) -> tuple[str, ...]:
    tokens = [t.strip().lower() for t in text.split(",") if t.strip()]
    if not tokens:
        raise ValueError("no estimators given")
    resolved = []
    for token in tokens:
        if token not in _ESTIMATOR_ALIASES:
            raise ValueError(f"unknown estimator {token!r}")
        canon = _ESTIMATOR_ALIASES[token]
        if canon not in resolved:
            resolved.append(canon)
    return tuple(resolved)


def _resolve(args: argparse.Namespace) -> RunConfig:
    file_values: dict[str, str] = {}
    if getattr(args, "config", None):
        file_values = parse_config_file(args.config)

    cfg = RunConfig(command=args.command)

    def pick(name: str, parse, flag_value):
        if flag_value is not None:
            setattr(cfg, name, parse(flag_value) if isinstance(flag_value, str) else flag_value)
        elif name in file_values:
            setattr(cfg, name, parse(file_values[name]))

    pick("economy", str, getattr(args, "economy", None))
    pick("data", str, getattr(args, "data", None))
    pick("spec", str, getattr(args, "spec", None))
    pick("estimators", _parse_estimators, getattr(args, "estimators", None))
    pick("effects", str, getattr(args, "effects", None))
    pick("leader", str, getattr(args, "leader", None))
    pick("sigma", float, getattr(args, "sigma", None))
    pick("mu", float, getattr(args, "mu", None))
    pick("damping", float, getattr(args, "damping", None))
    pick("tol", float, getattr(args, "tol", None))
    pick("max_iter", int, getattr(args, "max_iter", None))
    pick("seed", int, getattr(args, "seed", None))
    pick("out", str, getattr(args, "out", None))
    pick("results", str, getattr(args, "results", None))
    pick("dims", _parse_dims, getattr(args, "dims", None))
    pick("missing_rate", float, getattr(args, "missing_rate", None))
    pick("effect_sd", float, getattr(args, "effect_sd", None))
    pick("noise_sd", float, getattr(args, "noise_sd", None))

    if getattr(args, "include_leader", False):
        cfg.include_leader = True
    elif "include_leader" in file_values:
        cfg.include_leader = _parse_bool(file_values["include_leader"])
    if getattr(args, "endogenous_income", False):
        cfg.endogenous_income = True
    elif "endogenous_income" in file_values:
        cfg.endogenous_income = _parse_bool(file_values["endogenous_income"])

    coefficients = {
        key.split(".", 1)[1]: float(value)
        for key, value in file_values.items()
        if key.startswith("coeff.")
    }
    for item in getattr(args, "coeff", None) or []:
        if "=" not in item:
            raise ValueError(f"--coeff expects name=value, got {item!r}")
        name, value = item.split("=", 1)
        coefficients[name.strip()] = float(value)
    if coefficients:
        cfg.coefficients = coefficients

    if cfg.spec not in SPEC_NAMES:
        raise ValueError(f"unknown spec {cfg.spec!r} (choose from {', '.join(SPEC_NAMES)})")
    return cfg


def _default_truth(spec: str) -> dict[str, float]:
    columns = spec_columns(spec)
    return {
        name: _DEFAULT_COEFFICIENTS[i % len(_DEFAULT_COEFFICIENTS)]
        for i, name in enumerate(columns)
    }


def _cmd_simulate(cfg: RunConfig) -> int:
    if not cfg.economy:
        raise NegPanelError("simulate needs --economy pointing to a JSON economy file")
    economy = econ_mod.load_economy(cfg.economy)
    if cfg.sigma is not None or cfg.mu is not None:
        economy = econ_mod.with_params(economy, sigma=cfg.sigma, mu=cfg.mu)
    state = econ_mod.solve_equilibrium(
        economy,
        endogenous_income=cfg.endogenous_income,
        damping=cfg.damping,
        tol=cfg.tol,
        max_iter=cfg.max_iter,
    )
    lines = [cfg.header()]
    width = max(len("region"), *(len(r) for r in economy.regions))
    lines.append(f"{'region'.ljust(width)}  {'nominal_wage':>16}  {'price_index':>16}  {'real_wage':>16}")
    for i, region in enumerate(economy.regions):
        lines.append(
            f"{region.ljust(width)}  {state.nominal_wage[i]:>16.10g}"
            f"  {state.price_index[i]:>16.10g}  {state.real_wage[i]:>16.10g}"
        )
    lines.append(f"iterations: {state.iterations}")
    lines.append(f"residual: {state.residual:.3e}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "equilibrium.txt").write_text(text, encoding="utf-8")
    return 0


def _cmd_estimate(cfg: RunConfig) -> int:
    if not cfg.data:
        raise NegPanelError("estimate needs --data pointing to a panel CSV file")
    data = load_csv(cfg.data)
    report = validate_panel(data)
    design = build_spec(
        cfg.spec,
        data,
        leader_region=cfg.leader,
        include_leader=cfg.include_leader,
        effects=cfg.effects,
    )
    results: list[FitResult] = []
    for estimator in cfg.estimators:
        results.append(_FITTERS[estimator](design))
    by_kind = {r.estimator: r for r in results}
    hausman = None
    if "lsdv" in by_kind and "random_effects" in by_kind:
        hausman = hausman_test(by_kind["lsdv"], by_kind["random_effects"])

    title = f"{cfg.spec}: {spec_description(cfg.spec)}"
    header = (cfg.header(), f"# n={design.n_obs} dropped={len(design.dropped)} missing_cells={len(report.missing_cells)}")
    text = render_table(results, hausman=hausman, title=title, header_lines=header)
    sys.stdout.write(text)
    if cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"{cfg.spec}_table.txt").write_text(text, encoding="utf-8")
        csv_text = export_csv(results, hausman=hausman, header_lines=header)
        (out_dir / f"{cfg.spec}_results.csv").write_text(csv_text, encoding="utf-8")
    return 0


def _cmd_synth(cfg: RunConfig) -> int:
    truth_map = cfg.coefficients or _default_truth(cfg.spec)
    synth_cfg = SyntheticConfig(
        true_coefficients=truth_map,
        effect_sd=cfg.effect_sd,
        noise_sd=cfg.noise_sd,
        missing_rate=cfg.missing_rate,
        seed=cfg.seed or 0,
        dimensions=cfg.dims,
        leader_region=cfg.leader,
    )
    data, truth = generate_synthetic(synth_cfg, cfg.spec)
    out_dir = Path(cfg.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    data_path = out_dir / f"{cfg.spec}_synthetic.csv"
    truth_path = out_dir / f"{cfg.spec}_truth.json"
    save_csv(data, data_path)
    truth_path.write_text(truth.to_json(), encoding="utf-8")
    sys.stdout.write(cfg.header() + "\n")
    sys.stdout.write(f"wrote {data.n_obs} observations to {data_path}\n")
    sys.stdout.write(f"wrote truth record to {truth_path}\n")
    return 0


def _cmd_report(cfg: RunConfig) -> int:
    if not cfg.results:
        raise NegPanelError("report needs --results pointing to an exported results CSV")
    text = Path(cfg.results).read_text(encoding="utf-8")
    results, hausman, spec = load_results_csv(text)
    title = f"{spec}: {spec_description(spec)}" if spec in SPEC_NAMES else spec
    rendered = render_table(results, hausman=hausman, title=title, header_lines=(cfg.header(),))
    sys.stdout.write(rendered)
    if cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"{spec or 'results'}_table.txt").write_text(rendered, encoding="utf-8")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="negpanel",
        description="Simulate regional wage equilibria and estimate panel wage regressions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value config file; flags override it")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="seed for anything random")

    p_sim = sub.add_parser("simulate", help="solve an economy file for its wage equilibrium")
    common(p_sim)
    p_sim.add_argument("--economy", help="JSON economy file")
    p_sim.add_argument("--sigma", type=float, help="substitution elasticity override")
    p_sim.add_argument("--mu", type=float, help="expenditure share override")
    p_sim.add_argument("--damping", type=float, help="relaxation factor in (0, 1]")
    p_sim.add_argument("--tol", type=float, help="relative convergence tolerance")
    p_sim.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap")
    p_sim.add_argument(
        "--endogenous-income",
        dest="endogenous_income",
        action="store_true",
        default=False,
        help="recompute incomes from wages each iteration",
    )

    p_est = sub.add_parser("estimate", help="build a specification and run panel estimators")
    common(p_est)
    p_est.add_argument("--data", help="panel CSV file")
    p_est.add_argument("--spec", choices=SPEC_NAMES, help="specification name")
    p_est.add_argument("--estimators", help="comma list: pooled, lsdv, re")
    p_est.add_argument("--effects", choices=("none", "unit", "region", "industry"), help="dummy design")
    p_est.add_argument("--leader", help="leader region for the ratio specifications")
    p_est.add_argument(
        "--include-leader",
        dest="include_leader",
        action="store_true",
        default=False,
        help="keep the leader region's own (zero-response) rows",
    )

    p_syn = sub.add_parser("synth", help="write a synthetic panel plus its truth record")
    common(p_syn)
    p_syn.add_argument("--spec", choices=SPEC_NAMES, help="target specification")
    p_syn.add_argument("--dims", help="grid as regions x industries x years, e.g. 5x9x8")
    p_syn.add_argument("--missing-rate", dest="missing_rate", type=float, help="cell drop probability")
    p_syn.add_argument("--effect-sd", dest="effect_sd", type=float, help="unit effect s.d.")
    p_syn.add_argument("--noise-sd", dest="noise_sd", type=float, help="observation noise s.d.")
    p_syn.add_argument("--leader", help="region exempt from missingness / ratio denominator")
    p_syn.add_argument(
        "--coeff",
        action="append",
        metavar="NAME=VALUE",
        help="true coefficient, repeatable (default: built-in cycle)",
    )

    p_rep = sub.add_parser("report", help="re-render a table from an exported results CSV")
    common(p_rep)
    p_rep.add_argument("--results", help="results CSV produced by estimate")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        if args.command == "simulate":
            return _cmd_simulate(cfg)
        if args.command == "estimate":
            return _cmd_estimate(cfg)
        if args.command == "synth":
            return _cmd_synth(cfg)
        return _cmd_report(cfg)
    except NegPanelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
