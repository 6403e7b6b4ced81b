"""Trend fitting, confidence bands, parity estimation, and the t quantile."""

import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from leadshare.errors import MalformedRecord, TooFewPoints, ZeroVariance
from leadshare.forecast import (
    PARITY_THRESHOLDS,
    confidence_band,
    fit_points,
    forecast_series,
    ols_fit,
    parity_year,
    read_forecast,
    write_forecast,
)
from leadshare.metrics import RegionSeries
from leadshare.tdist import t_cdf, t_quantile


def series(points, metric="LeadShare"):
    return RegionSeries(
        pair=("China", "U.S."), focal="China", metric=metric,
        points=tuple(points), filter_desc="all",
    )


def exact_line(slope, intercept, years):
    return [(y, slope * y + intercept) for y in years]


class TestFit:
    def test_frozen_three_point_fit(self):
        fit = fit_points([(2010, 0.1), (2011, 0.2), (2012, 0.3)])
        assert fit.slope == pytest.approx(0.1, abs=1e-12)
        assert fit.intercept == pytest.approx(-200.9, abs=1e-9)
        assert fit.dof == 1
        assert fit.x_mean == pytest.approx(2011.0)
        assert fit.s_xx == pytest.approx(2.0)
        assert fit.residual_variance == pytest.approx(0.0, abs=1e-20)
        assert fit.x_min == 2010 and fit.x_max == 2012

    def test_matches_polyfit(self):
        rng = np.random.default_rng(4)
        years = list(range(2005, 2021))
        values = 0.01 * np.array(years) - 19.5 + rng.normal(0, 0.02, len(years))
        fit = fit_points(list(zip(years, values)))
        slope, intercept = np.polyfit(years, values, 1)
        assert fit.slope == pytest.approx(slope, abs=1e-9)
        assert fit.intercept == pytest.approx(intercept, abs=1e-6)
        resid = values - (fit.slope * np.array(years) + fit.intercept)
        assert fit.residual_variance == pytest.approx(
            float(resid @ resid) / (len(years) - 2), rel=1e-9
        )

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            fit_points([(2010, 0.1), (2011, 0.2)])

    def test_zero_x_variance(self):
        with pytest.raises(ZeroVariance):
            fit_points([(2010, 0.1), (2010, 0.2), (2010, 0.3)])

    def test_window_is_inclusive(self):
        s = series(exact_line(0.01, -19.9, range(2000, 2025)))
        fit = ols_fit(s, window=(2010, 2020))
        assert fit.x_min == 2010 and fit.x_max == 2020
        assert fit.dof == 11 - 2

    def test_window_too_narrow(self):
        s = series(exact_line(0.01, -19.9, range(2000, 2025)))
        with pytest.raises(TooFewPoints):
            ols_fit(s, window=(2010, 2011))

    @settings(max_examples=50, deadline=None)
    @given(
        st.integers(-100, 100),
        st.integers(-1000, 1000),
        st.integers(4, 12),
    )
    def test_exact_line_recovery(self, slope_m, intercept_m, n):
        slope = slope_m / 1000.0
        intercept = intercept_m / 10.0
        fit = fit_points(exact_line(slope, intercept, range(2000, 2000 + n)))
        assert abs(fit.slope - slope) <= 1e-9 * max(1.0, abs(slope))
        assert abs(fit.intercept - intercept) <= 1e-6 * max(1.0, abs(intercept))


class TestTDist:
    def test_quantile_frozen_values(self):
        # reference values from standard t tables
        assert t_quantile(0.975, 1) == pytest.approx(12.7062047362, abs=1e-9)
        assert t_quantile(0.975, 10) == pytest.approx(2.2281388520, abs=1e-9)
        assert t_quantile(0.95, 5) == pytest.approx(2.0150483733, abs=1e-9)
        assert t_quantile(0.995, 2) == pytest.approx(9.9248432009, abs=1e-9)
        assert t_quantile(0.975, 30) == pytest.approx(2.0422724563, abs=1e-9)

    @pytest.mark.parametrize("dof", [1, 2, 3, 5, 10, 30, 100])
    @pytest.mark.parametrize("p", [0.6, 0.9, 0.95, 0.975, 0.995])
    def test_quantile_against_scipy(self, p, dof):
        assert t_quantile(p, dof) == pytest.approx(
            scipy.stats.t.ppf(p, dof), abs=1e-9
        )

    @pytest.mark.parametrize("dof", [1, 4, 25])
    @pytest.mark.parametrize("x", [-6.0, -1.5, -0.3, 0.0, 0.7, 2.0, 8.0])
    def test_cdf_against_scipy(self, x, dof):
        assert t_cdf(x, dof) == pytest.approx(
            scipy.stats.t.cdf(x, dof), abs=1e-12
        )

    @given(st.floats(-20, 20), st.integers(1, 50))
    @settings(max_examples=100)
    def test_cdf_symmetry(self, x, dof):
        assert t_cdf(x, dof) + t_cdf(-x, dof) == pytest.approx(1.0, abs=1e-12)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            t_quantile(1.0, 5)
        with pytest.raises(ValueError):
            t_quantile(0.5, 0)
        with pytest.raises(ValueError):
            t_cdf(0.0, -1)


class TestBand:
    def fit_with_noise(self, seed=1):
        rng = np.random.default_rng(seed)
        years = list(range(2010, 2022))
        values = 0.012 * np.array(years) - 24.0 + rng.normal(0, 0.03, len(years))
        return fit_points(list(zip(years, values)))

    def test_band_matches_direct_formula(self):
        fit = self.fit_with_noise()
        tq = t_quantile(0.975, fit.dof)
        for x in [2010.0, 2015.5, 2021.0, 2040.0]:
            lo, hi = confidence_band(fit, x)
            point = fit.slope * x + fit.intercept
            half = tq * math.sqrt(
                fit.residual_variance
                * (1.0 / fit.n + (x - fit.x_mean) ** 2 / fit.s_xx)
            )
            assert lo == pytest.approx(point - half, abs=1e-12)
            assert hi == pytest.approx(point + half, abs=1e-12)

    def test_band_narrowest_at_x_mean(self):
        fit = self.fit_with_noise()
        widths = []
        for x in [fit.x_mean - 10, fit.x_mean - 1, fit.x_mean, fit.x_mean + 3]:
            lo, hi = confidence_band(fit, x)
            widths.append(hi - lo)
        assert min(widths) == widths[2]

    def test_band_collapses_on_exact_fit(self):
        fit = fit_points(exact_line(0.01, -19.9, range(2010, 2020)))
        lo, hi = confidence_band(fit, 2030.0)
        point = fit.slope * 2030.0 + fit.intercept
        assert lo == pytest.approx(point, abs=1e-9)
        assert hi == pytest.approx(point, abs=1e-9)


class TestParity:
    def test_closed_form_crossing(self):
        fit = fit_points(exact_line(0.012, -24.25, range(2010, 2022)))
        est = parity_year(fit, 0.5, horizon=2100)
        # 0.012 x - 24.25 = 0.5  =>  x = 24.75 / 0.012 = 2062.5
        assert est.point_year == pytest.approx(2062.5, abs=1e-6)
        assert not est.already_reached
        # band collapses onto the fit line, so the edges agree with the point
        assert est.lower_year == pytest.approx(2062.5, abs=1e-4)
        assert est.upper_year == pytest.approx(2062.5, abs=1e-4)

    def test_already_reached_depends_on_threshold(self):
        fit = fit_points(exact_line(0.012, -24.25, range(2010, 2022)))
        # fitted value at the last observed year is 0.002
        assert not parity_year(fit, 0.5, horizon=2100).already_reached
        reached = parity_year(fit, 0.0, horizon=2100)
        assert reached.already_reached
        assert reached.point_year is not None
        assert reached.point_year <= fit.x_max

    def test_falling_series_reached(self):
        fit = fit_points(exact_line(-0.01, 20.15, range(2010, 2022)))
        # values fall through 0.0 at 2015, inside the window
        est = parity_year(fit, 0.0, horizon=2100)
        assert est.already_reached
        assert est.point_year == pytest.approx(2015.0, abs=1e-6)

    def test_band_edge_ordering_rising(self):
        rng = np.random.default_rng(7)
        years = list(range(2008, 2022))
        values = 0.01 * np.array(years) - 19.95 + rng.normal(0, 0.01, len(years))
        fit = fit_points(list(zip(years, values)))
        est = parity_year(fit, 0.5, horizon=3000)
        assert est.lower_year is not None and est.upper_year is not None
        assert est.lower_year <= est.point_year <= est.upper_year

    def test_band_edge_ordering_falling(self):
        rng = np.random.default_rng(8)
        years = list(range(2008, 2022))
        values = -0.01 * np.array(years) + 20.6 + rng.normal(0, 0.01, len(years))
        fit = fit_points(list(zip(years, values)))
        est = parity_year(fit, 0.0, horizon=3000)
        assert est.lower_year is not None and est.upper_year is not None
        # crossings follow the trend: on a falling series the lower band
        # edge reaches the threshold first, so the named bounds swap order
        assert est.upper_year <= est.point_year <= est.lower_year

    def test_never_within_horizon(self):
        fit = fit_points(exact_line(0.0001, -0.1, range(2010, 2022)))
        est = parity_year(fit, 0.5, horizon=2100)
        assert est.point_year is None
        assert not est.already_reached

    def test_flat_line_below_threshold(self):
        fit = fit_points([(y, 0.2) for y in range(2010, 2016)])
        assert fit.slope == 0.0
        est = parity_year(fit, 0.5, horizon=2100)
        assert est.point_year is None
        assert est.lower_year is None and est.upper_year is None
        assert not est.already_reached

    def test_flat_line_above_threshold(self):
        fit = fit_points([(y, 0.8) for y in range(2010, 2016)])
        est = parity_year(fit, 0.5, horizon=2100)
        assert est.already_reached

    def test_band_edges_sit_on_threshold(self):
        rng = np.random.default_rng(99)
        hits = 0
        for trial in range(50):
            years = list(range(2006, 2022))
            slope = rng.uniform(0.005, 0.02)
            values = slope * np.array(years) + (0.3 - slope * 2021) + rng.normal(
                0, 0.02, len(years)
            )
            fit = fit_points(list(zip(years, values)))
            est = parity_year(fit, 0.5, horizon=3000)
            if est.lower_year is not None and not est.already_reached:
                lo, hi = confidence_band(fit, est.lower_year)
                assert hi == pytest.approx(0.5, abs=1e-5)
                hits += 1
            if est.upper_year is not None and not est.already_reached:
                lo, hi = confidence_band(fit, est.upper_year)
                assert lo == pytest.approx(0.5, abs=1e-5)
        assert hits > 10


class TestForecastSeries:
    def test_default_thresholds(self):
        assert PARITY_THRESHOLDS == {
            "LeadShare": 0.5,
            "SupporterShare": 0.5,
            "LeadPremium": 0.0,
        }
        share = forecast_series(
            series(exact_line(0.012, -24.25, range(2010, 2022))), horizon=2100
        )
        assert share.parity.threshold == 0.5
        assert share.parity.point_year == pytest.approx(2062.5, abs=1e-6)
        premium = forecast_series(
            series(exact_line(0.012, -24.25, range(2010, 2022)), metric="LeadPremium"),
            horizon=2100,
        )
        # premium parity sits at 0.0, crossed at x = 24.25 / 0.012
        assert premium.parity.threshold == 0.0
        assert premium.parity.point_year == pytest.approx(24.25 / 0.012, abs=1e-6)
        assert premium.parity.already_reached

    def test_explicit_threshold_override(self):
        row = forecast_series(
            series(exact_line(0.012, -24.25, range(2010, 2022))),
            horizon=2200,
            threshold=0.8,
        )
        assert row.parity.point_year == pytest.approx(25.05 / 0.012, abs=1e-6)

    def test_short_series_rejected(self):
        with pytest.raises(TooFewPoints):
            forecast_series(series([(2010, 0.1), (2011, 0.2)]), horizon=2100)

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(11)
        noisy = [
            (y, 0.01 * y - 19.9 + rng.normal(0, 0.01)) for y in range(2008, 2022)
        ]
        rows = [
            forecast_series(series(noisy), window=(2008, 2021), horizon=2100),
            forecast_series(
                series(exact_line(0.0001, -0.1, range(2010, 2022)),
                       metric="LeadPremium"),
                horizon=2100,
            ),
        ]
        path = tmp_path / "forecast.tsv"
        write_forecast(rows, path)
        again = {d["metric"]: d for d in read_forecast(path)}
        assert len(again) == len(rows)
        for r in rows:
            d = again[r.metric]
            assert d["pair"] == r.pair and d["focal"] == r.focal
            assert d["filter"] == r.filter_desc
            assert d["slope"] == pytest.approx(r.fit.slope, abs=1e-9)
            assert d["intercept"] == pytest.approx(r.fit.intercept, abs=1e-9)
            assert d["already_reached"] == r.parity.already_reached
            for key, value in (
                ("point_year", r.parity.point_year),
                ("lower_year", r.parity.lower_year),
                ("upper_year", r.parity.upper_year),
            ):
                if value is None:
                    assert d[key] is None
                else:
                    assert d[key] == pytest.approx(value, abs=1e-6)

    def test_never_serialized_as_word(self, tmp_path):
        row = forecast_series(
            series(exact_line(0.0001, -0.1, range(2010, 2022))), horizon=2100
        )
        assert row.parity.point_year is None
        path = tmp_path / "forecast.tsv"
        write_forecast([row], path)
        body = path.read_text(encoding="utf-8").splitlines()[1]
        assert body.split("\t")[7:10] == ["never", "never", "never"]

    def test_read_rejects_bad_rows(self, tmp_path):
        header = (
            "pair\tfocal\tmetric\tfilter\tthreshold\tslope\tintercept\t"
            "point_year\tlower_year\tupper_year\talready_reached\n"
        )
        good = (
            "China|U.S.\tChina\tLeadShare\tall\t0.500000000\t0.012000000\t"
            "-24.250000000\t2062.500000000\tnever\tnever\tfalse\n"
        )
        path = tmp_path / "forecast.tsv"
        path.write_text(header + good.replace("LeadShare", "Dominance"),
                        encoding="utf-8")
        with pytest.raises(MalformedRecord):
            read_forecast(path)
        path.write_text(header + good.replace("\tfalse", ""), encoding="utf-8")
        with pytest.raises(MalformedRecord):
            read_forecast(path)
        path.write_text("not a header\n" + good, encoding="utf-8")
        with pytest.raises(MalformedRecord):
            read_forecast(path)

    def test_coverage_near_nominal(self):
        # the 95% band should contain the true mean response at x_mean
        # in roughly 95% of repeated noisy samples
        rng = np.random.default_rng(321)
        years = np.arange(2010, 2022)
        slope_true, intercept_true = 0.012, -24.0
        covered = 0
        trials = 200
        for _ in range(trials):
            values = slope_true * years + intercept_true + rng.normal(0, 0.05, len(years))
            fit = fit_points(list(zip(years.tolist(), values.tolist())))
            truth = slope_true * fit.x_mean + intercept_true
            lo, hi = confidence_band(fit, fit.x_mean)
            covered += int(lo <= truth <= hi)
        assert 0.90 <= covered / trials <= 1.0
