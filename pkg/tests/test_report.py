import csv
import dataclasses
import io

import numpy as np
import pytest

from negpanel import (
    build_eq4,
    export_csv,
    hausman_test,
    load_results_csv,
    lsdv_fit,
    random_effects_fit,
    render_table,
)
from negpanel.exceptions import MissingColumnError, SpecMismatchError
from negpanel.panel import FitResult, HausmanResult


def fit_with(names, coefficients, t_stats, p_values, spec="eq3", **stats_kw):
    coefficients = np.asarray(coefficients, dtype=float)
    t = np.asarray(t_stats, dtype=float)
    variances = np.where(t != 0, (coefficients / np.where(t != 0, t, 1.0)) ** 2, 0.0)
    defaults = dict(r_squared=0.81, durbin_watson=1.516, residual_sd=0.146, dof=290, n_obs=302)
    defaults.update(stats_kw)
    return FitResult(
        estimator="lsdv",
        names=tuple(names),
        coefficients=coefficients,
        covariance=np.diag(variances),
        t_stats=t,
        p_values=np.asarray(p_values, dtype=float),
        spec_name=spec,
        **defaults,
    )


@pytest.fixture(scope="module")
def fitted_pair(request):
    data, _ = request.getfixturevalue("eq4_fixture_302")
    design = build_eq4(data)
    fe = lsdv_fit(design)
    re = random_effects_fit(design)
    return fe, re, hausman_test(fe, re)


class TestTextRendering:
    def test_coefficient_cell_triplet(self):
        fit = fit_with(("lnw_pt",), [0.937], [15.239], [0.000])
        text = render_table([fit])
        assert "0.937*" in text
        assert "(15.239)" in text
        assert "(0.000)" in text

    def test_ten_percent_marker(self):
        fit = fit_with(("x",), [0.5], [1.8], [0.07])
        text = render_table([fit])
        assert "0.500**" in text

    def test_footer_rows(self, fitted_pair):
        fe, re, h = fitted_pair
        text = render_table([re, fe], hausman=h)
        assert "Degrees of freedom" in text
        assert "Number of observations  302 - 302" in text
        assert "Residual std. dev." in text
        assert "Hausman statistic" in text
        assert "(*) significant at the 5% level." in text

    def test_hausman_omitted_when_absent(self, fitted_pair):
        fe, _, _ = fitted_pair
        text = render_table([fe])
        assert "Hausman" not in text

    def test_invalid_hausman_annotated(self):
        fit = fit_with(("x",), [0.5], [2.0], [0.05])
        h = HausmanResult(statistic=-3.2, dof=1, p_value=1.0, valid=False)
        text = render_table([fit], hausman=h)
        assert "(invalid contrast)" in text
        assert "-3.200" in text

    def test_rendering_is_deterministic(self, fitted_pair):
        fe, re, h = fitted_pair
        a = render_table([re, fe], hausman=h, title="t")
        b = render_table([re, fe], hausman=h, title="t")
        assert a == b

    def test_spec_mismatch(self, fitted_pair):
        fe, _, _ = fitted_pair
        other = dataclasses.replace(fe, spec_name="eq3")
        with pytest.raises(SpecMismatchError):
            render_table([fe, other])

    def test_absorbed_constant_leaves_blank_cell(self, fitted_pair):
        fe, re, _ = fitted_pair
        text = render_table([fe, re])
        header = next(line for line in text.splitlines() if line.startswith("Variable"))
        assert header.split()[1] == "const"  # canonical order from the wider fit


class TestCsvLayout:
    def test_numbers_match_text_layout(self, fitted_pair):
        fe, re, h = fitted_pair
        text = render_table([re, fe], hausman=h)
        csv_text = render_table([re, fe], hausman=h, layout="csv")
        rows = list(csv.reader(io.StringIO(csv_text)))
        assert rows[0] == ["section", "estimator", "variable", "value", "marker"]
        for section, estimator, variable, value, marker in rows[1:]:
            if section in ("coef", "tstat", "signif", "stat") and value:
                assert value in text

    def test_header_lines_prefixed(self, fitted_pair):
        fe, _, _ = fitted_pair
        out = render_table([fe], layout="csv", header_lines=("# config-hash: abc  seed: 1",))
        assert out.startswith("# config-hash: abc")


class TestExport:
    def test_row_count(self, fitted_pair):
        fe, re, h = fitted_pair
        text = export_csv([fe, re], hausman=h)
        rows = [r for r in text.splitlines() if r and not r.startswith("#")]
        assert len(rows) - 1 == len(fe.names) + len(re.names)

    def test_full_precision_round_trip(self, fitted_pair):
        fe, re, h = fitted_pair
        text = export_csv([fe, re], hausman=h, header_lines=("# config-hash: x  seed: none",))
        results, hausman, spec = load_results_csv(text)
        assert spec == "eq4"
        assert hausman is not None
        assert hausman.statistic == h.statistic
        assert hausman.p_value == h.p_value
        by_kind = {r.estimator: r for r in results}
        for original in (fe, re):
            loaded = by_kind[original.estimator]
            assert loaded.names == original.names
            assert np.array_equal(loaded.coefficients, original.coefficients)
            assert np.array_equal(loaded.t_stats, original.t_stats)
            assert np.array_equal(loaded.p_values, original.p_values)
            assert loaded.r_squared == original.r_squared
            assert loaded.residual_sd == original.residual_sd
            assert loaded.dof == original.dof

    def test_rerender_from_export_matches(self, fitted_pair):
        fe, re, h = fitted_pair
        original = render_table([fe, re], hausman=h, title="t")
        results, hausman, _ = load_results_csv(export_csv([fe, re], hausman=h))
        rebuilt = render_table(results, hausman=hausman, title="t")
        assert rebuilt == original

    def test_bad_header_rejected(self):
        with pytest.raises(MissingColumnError):
            load_results_csv("a,b,c\n1,2,3\n")
        with pytest.raises(MissingColumnError):
            load_results_csv("")
