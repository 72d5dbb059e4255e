"""Table rendering and machine-readable exports for estimation results.

Text tables mirror the usual layout of panel regression tables: one
block per estimator with a coefficient row (3 decimals, significance
markers), t-statistics and significance levels in parentheses, then a
footer with degrees of freedom, observation count, residual standard
deviation and the Hausman contrast.  Rendering is a pure function of
its inputs; display rounding never feeds back into exports, which carry
full-precision values alongside the 3-decimal display strings.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import MissingColumnError, SpecMismatchError
from .panel import FitResult, HausmanResult
from .panel.diagnostics import summarize_fit

__all__ = [
    "ESTIMATOR_LABELS",
    "EstimationTable",
    "render_table",
    "export_csv",
    "load_results_csv",
]

ESTIMATOR_LABELS = {
    "pooled": "Pooled OLS",
    "lsdv": "LSDV",
    "random_effects": "Random effects",
}

_FOOTNOTE = "(*) significant at the 5% level.  (**) significant at the 10% level."


def _fmt(value: float) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return f"{value:.3f}"


@dataclass(frozen=True)
class EstimationTable:
    """Layout-ready view of one or more fits sharing a specification."""

    title: str
    spec_name: str
    columns: tuple[str, ...]
    results: tuple[FitResult, ...]
    hausman: HausmanResult | None = None

    @classmethod
    def from_results(cls, results, hausman=None, title=None) -> "EstimationTable":
        results = tuple(results)
        if not results:
            raise SpecMismatchError("no results to render")
        spec = results[0].spec_name
        if any(r.spec_name != spec for r in results):
            raise SpecMismatchError("results come from different specifications")
        # seed the column order with the widest fit so absorbed columns
        # (e.g. a constant dropped by the dummy estimator) keep their place
        base = max(results, key=lambda r: len(r.names))
        columns = list(base.names)
        for r in results:
            for name in r.names:
                if name not in columns:
                    columns.append(name)
        return cls(
            title=title or (spec or "estimation results"),
            spec_name=spec,
            columns=tuple(columns),
            results=results,
            hausman=hausman,
        )

    def coefficient_cells(self, result: FitResult):
        """(coefficient+marker, t-stat, significance) strings per table column."""
        markers = summarize_fit(result)
        cells = []
        for name in self.columns:
            if name in result.names:
                i = result.names.index(name)
                cells.append(
                    (
                        _fmt(result.coefficients[i]) + markers[i],
                        f"({_fmt(result.t_stats[i])})",
                        f"({_fmt(result.p_values[i])})",
                    )
                )
            else:
                cells.append(("", "", ""))
        return cells

    def footer_rows(self):
        rows = [
            ("Degrees of freedom", " - ".join(str(r.dof) for r in self.results)),
            ("Number of observations", " - ".join(str(r.n_obs) for r in self.results)),
            ("Residual std. dev.", " - ".join(_fmt(r.residual_sd) for r in self.results)),
        ]
        if self.hausman is not None:
            h = self.hausman
            marker = "*" if h.valid and h.p_value < 0.05 else ""
            text = f"{_fmt(h.statistic)}{marker} (p={_fmt(h.p_value)}, dof={h.dof})"
            if not h.valid:
                text += " (invalid contrast)"
            rows.append(("Hausman statistic", text))
        return rows


def _render_text(table: EstimationTable, header_lines) -> str:
    label_width = max(
        [len("  Coefficients"), len("  T-stat."), len("  Signif. level"), len("Variable")]
        + [len(ESTIMATOR_LABELS.get(r.estimator, r.estimator)) for r in table.results]
    )
    blocks = []
    for result in table.results:
        cells = table.coefficient_cells(result)
        blocks.append((result, cells))

    widths = []
    for j, name in enumerate(table.columns):
        cell_width = max([len(name)] + [max(len(c[j][0]), len(c[j][1]), len(c[j][2])) for _, c in blocks])
        widths.append(cell_width)
    stat_width = max(len("0.000"), len("R2"), len("DW"))

    def pad(text, width):
        return text.ljust(width)

    header_cols = ["Variable".ljust(label_width)]
    header_cols += [pad(name, w) for name, w in zip(table.columns, widths)]
    header_cols += [pad("R2", stat_width), pad("DW", stat_width)]
    header_row = "  ".join(header_cols).rstrip()

    lines = list(header_lines)
    lines.append(table.title)
    rule = "=" * len(header_row)
    lines.append(rule)
    lines.append(header_row)
    for result, cells in blocks:
        lines.append(ESTIMATOR_LABELS.get(result.estimator, result.estimator))
        coef_cols = [pad("  Coefficients", label_width)]
        coef_cols += [pad(c[0], w) for c, w in zip(cells, widths)]
        coef_cols += [pad(_fmt(result.r_squared), stat_width), pad(_fmt(result.durbin_watson), stat_width)]
        lines.append("  ".join(coef_cols).rstrip())
        t_cols = [pad("  T-stat.", label_width)] + [pad(c[1], w) for c, w in zip(cells, widths)]
        lines.append("  ".join(t_cols).rstrip())
        p_cols = [pad("  Signif. level", label_width)] + [pad(c[2], w) for c, w in zip(cells, widths)]
        lines.append("  ".join(p_cols).rstrip())
    lines.append("-" * len(header_row))
    footer_label_width = max(len(label) for label, _ in table.footer_rows())
    for label, value in table.footer_rows():
        lines.append(f"{label.ljust(footer_label_width)}  {value}")
    lines.append("-" * len(header_row))
    lines.append(_FOOTNOTE)
    return "\n".join(lines) + "\n"


def _render_csv(table: EstimationTable, header_lines) -> str:
    buffer = io.StringIO()
    for line in header_lines:
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["section", "estimator", "variable", "value", "marker"])
    for result in table.results:
        markers = summarize_fit(result)
        for i, name in enumerate(result.names):
            writer.writerow(["coef", result.estimator, name, _fmt(result.coefficients[i]), markers[i]])
            writer.writerow(["tstat", result.estimator, name, _fmt(result.t_stats[i]), ""])
            writer.writerow(["signif", result.estimator, name, _fmt(result.p_values[i]), ""])
        writer.writerow(["stat", result.estimator, "r_squared", _fmt(result.r_squared), ""])
        writer.writerow(["stat", result.estimator, "durbin_watson", _fmt(result.durbin_watson), ""])
        writer.writerow(["stat", result.estimator, "dof", str(result.dof), ""])
        writer.writerow(["stat", result.estimator, "n_obs", str(result.n_obs), ""])
        writer.writerow(["stat", result.estimator, "residual_sd", _fmt(result.residual_sd), ""])
    if table.hausman is not None:
        h = table.hausman
        marker = "*" if h.valid and h.p_value < 0.05 else ""
        writer.writerow(["stat", "", "hausman", _fmt(h.statistic), marker])
        writer.writerow(["stat", "", "hausman_p", _fmt(h.p_value), ""])
    return buffer.getvalue()


def render_table(results, hausman=None, layout: str = "text", title=None, header_lines=()) -> str:
    """Render fits that share a specification as a text or CSV table."""
    table = EstimationTable.from_results(results, hausman=hausman, title=title)
    if layout == "text":
        return _render_text(table, header_lines)
    if layout == "csv":
        return _render_csv(table, header_lines)
    raise ValueError(f"unknown layout {layout!r}")


_EXPORT_COLUMNS = (
    "spec",
    "estimator",
    "variable",
    "coefficient",
    "t_stat",
    "p_value",
    "marker",
    "coefficient_3dp",
    "t_stat_3dp",
    "p_value_3dp",
    "r_squared",
    "durbin_watson",
    "residual_sd",
    "dof",
    "n_obs",
    "sigma2_u",
    "sigma2_e",
    "hausman",
    "hausman_p",
    "hausman_dof",
    "hausman_valid",
)


def _full(value) -> str:
    if value is None:
        return ""
    value = float(value)
    return "nan" if math.isnan(value) else repr(value)


def export_csv(results, hausman=None, header_lines=()) -> str:
    """Flat one-row-per-coefficient export with full-precision values.

    Display strings (3 decimals) travel alongside the exact values;
    Hausman fields repeat on every row of the pair being contrasted.
    """
    results = tuple(results)
    if not results:
        raise SpecMismatchError("no results to export")
    spec = results[0].spec_name
    if any(r.spec_name != spec for r in results):
        raise SpecMismatchError("results come from different specifications")

    buffer = io.StringIO()
    for line in header_lines:
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(_EXPORT_COLUMNS)
    h = hausman
    for result in results:
        markers = summarize_fit(result)
        s2u, s2e = result.variance_components or (None, None)
        for i, name in enumerate(result.names):
            writer.writerow(
                [
                    spec,
                    result.estimator,
                    name,
                    _full(result.coefficients[i]),
                    _full(result.t_stats[i]),
                    _full(result.p_values[i]),
                    markers[i],
                    _fmt(result.coefficients[i]),
                    _fmt(result.t_stats[i]),
                    _fmt(result.p_values[i]),
                    _full(result.r_squared),
                    _full(result.durbin_watson),
                    _full(result.residual_sd),
                    str(result.dof),
                    str(result.n_obs),
                    _full(s2u),
                    _full(s2e),
                    _full(h.statistic) if h else "",
                    _full(h.p_value) if h else "",
                    str(h.dof) if h else "",
                    str(h.valid) if h else "",
                ]
            )
    return buffer.getvalue()


def load_results_csv(text: str):
    """Rebuild fits (diagonal covariance) and the Hausman result from an export.

    Returns ``(results, hausman, spec)``.  Lines starting with ``#`` are
    treated as reproducibility headers and skipped.
    """
    lines = [line for line in text.splitlines() if line and not line.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumnError("empty results file") from None
    if tuple(header) != _EXPORT_COLUMNS:
        raise MissingColumnError("unexpected results header; not a negpanel export")

    groups: dict[str, dict] = {}
    order: list[str] = []
    hausman = None
    spec = ""
    for row in reader:
        record = dict(zip(_EXPORT_COLUMNS, row))
        spec = record["spec"]
        est = record["estimator"]
        if est not in groups:
            groups[est] = {
                "names": [],
                "coef": [],
                "t": [],
                "p": [],
                "r2": float(record["r_squared"]),
                "dw": float(record["durbin_watson"]),
                "sd": float(record["residual_sd"]),
                "dof": int(record["dof"]),
                "n": int(record["n_obs"]),
                "vc": (
                    (float(record["sigma2_u"]), float(record["sigma2_e"]))
                    if record["sigma2_u"]
                    else None
                ),
            }
            order.append(est)
        g = groups[est]
        g["names"].append(record["variable"])
        g["coef"].append(float(record["coefficient"]))
        g["t"].append(float(record["t_stat"]))
        g["p"].append(float(record["p_value"]))
        if hausman is None and record["hausman"]:
            hausman = HausmanResult(
                statistic=float(record["hausman"]),
                dof=int(record["hausman_dof"]),
                p_value=float(record["hausman_p"]),
                valid=record["hausman_valid"] == "True",
            )

    results = []
    for est in order:
        g = groups[est]
        coef = np.array(g["coef"])
        t = np.array(g["t"])
        variances = np.zeros(len(coef))
        for i, (c, ti) in enumerate(zip(coef, t)):
            if ti != 0.0 and math.isfinite(ti):
                variances[i] = (c / ti) ** 2
        results.append(
            FitResult(
                estimator=est,
                names=tuple(g["names"]),
                coefficients=coef,
                covariance=np.diag(variances),
                t_stats=t,
                p_values=np.array(g["p"]),
                r_squared=g["r2"],
                durbin_watson=g["dw"],
                residual_sd=g["sd"],
                dof=g["dof"],
                n_obs=g["n"],
                spec_name=spec,
                variance_components=g["vc"],
            )
        )
    return results, hausman, spec
