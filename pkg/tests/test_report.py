import json
import math

import pytest

from privacy_lab import (
    MarketParams,
    SweepSpec,
    fee_revenue_comparison,
    privacy_subsidy,
    subsidy_curve,
    sweep,
    table_btc,
    write_report_bundle,
)
from privacy_lab.report import (
    SWEEP_CSV_COLUMNS,
    btc_table_to_csv,
    curve_sidecar_json,
    curve_to_csv,
    format_float,
    regime_label,
    sweep_to_csv,
)

SQRT2 = math.sqrt(2.0)
UNIT = MarketParams(1.0, 1.0)

TABLE1_ROUNDED = {
    0.0: (0.500, 1.000, 0.000),
    0.5: (0.447, 1.118, 0.112),
    1.0: (0.354, 1.414, 0.354),
    SQRT2: (0.289, 1.732, 0.577),
    2.0: (0.224, 2.236, 0.894),
    3.0: (0.158, 3.162, 1.423),
    5.0: (0.098, 5.099, 2.451),
}


class TestSweep:
    def test_dimensionless_table_rounds_to_reference(self):
        spec = SweepSpec(UNIT, tuple(sorted(TABLE1_ROUNDED)), frozenset({"equilibrium", "welfare"}))
        for row in sweep(spec):
            lam3, beta3, sub3 = TABLE1_ROUNDED[row.sigma_eps]
            assert round(row.lam, 3) == lam3
            assert round(row.beta, 3) == beta3
            assert round(row.subsidy, 3) == sub3

    def test_single_point_sweep(self):
        (row,) = sweep(SweepSpec(UNIT, (0.0,), frozenset({"equilibrium", "welfare"})))
        assert (round(row.lam, 3), round(row.beta, 3), round(row.subsidy, 3)) == (0.5, 1.0, 0.0)
        assert row.note == "textbook Kyle"

    def test_outputs_control_population(self):
        (row,) = sweep(SweepSpec(UNIT, (1.0,), frozenset({"equilibrium"})))
        assert row.lam is not None
        assert row.pi_I is None and row.subsidy is None and row.fee_rate is None

        (row,) = sweep(SweepSpec(UNIT, (1.0,), frozenset({"fee"})))
        assert row.fee_rate is not None and row.lam is None

    @pytest.mark.parametrize("values", [(), (1.0, 1.0), (2.0, 1.0), (-1.0,), (math.nan,)])
    def test_bad_grids_rejected(self, values):
        with pytest.raises(ValueError):
            sweep(SweepSpec(UNIT, values))

    def test_unknown_output_rejected(self):
        with pytest.raises(ValueError):
            sweep(SweepSpec(UNIT, (1.0,), frozenset({"volatility"})))


class TestCsvEmission:
    def test_header_schema(self):
        text = sweep_to_csv(sweep(SweepSpec(UNIT, (0.0, 1.0))))
        assert text.split("\n")[0] == ",".join(SWEEP_CSV_COLUMNS)
        assert text.split("\n")[0] == "sigma_eps,lambda,beta,pi_I,pi_N,pi_M,subsidy,d1,d2,fee_rate,note"

    def test_byte_identical_reruns(self):
        spec = SweepSpec(UNIT, (0.0, 0.5, 1.0, SQRT2))
        assert sweep_to_csv(sweep(spec)) == sweep_to_csv(sweep(spec))

    def test_floats_round_trip(self):
        rows = sweep(SweepSpec(UNIT, (1.0,)))
        line = sweep_to_csv(rows).split("\n")[1]
        cells = line.split(",")
        parsed = float(cells[1])
        assert parsed == rows[0].lam

    def test_unpopulated_columns_are_empty(self):
        text = sweep_to_csv(sweep(SweepSpec(UNIT, (1.0,), frozenset({"equilibrium"}))))
        cells = text.split("\n")[1].split(",")
        by_col = dict(zip(SWEEP_CSV_COLUMNS, cells))
        assert by_col["pi_I"] == "" and by_col["fee_rate"] == ""
        assert by_col["lambda"] != ""

    def test_format_float_is_round_trip_exact(self):
        for x in (0.1, 1 / 3, 0.35355339059327373, 1.0607e6, 5e-324):
            assert float(format_float(x)) == x


class TestBtcTable:
    # the published approximate values this calibration should land near
    APPROX = {0.1: 15_000.0, 0.5: 335_000.0, 1.0: 1_060_000.0, SQRT2: 1_730_000.0, 2.0: 2_680_000.0}
    FRACTIONS = {0.1: 0.005, 0.5: 0.112, 1.0: 0.354, SQRT2: 0.577, 2.0: 0.894}

    def test_subsidies_within_one_percent(self):
        for row in table_btc().rows:
            approx = self.APPROX[row.ratio]
            assert abs(row.subsidy_usd - approx) / approx <= 0.01

    def test_fractions_round_to_reference(self):
        for row in table_btc().rows:
            assert round(row.fraction, 3) == self.FRACTIONS[row.ratio]

    def test_sqrt2_row_is_symbolic(self):
        rows = {r.ratio: r for r in table_btc().rows}
        assert rows[SQRT2].sigma_eps == SQRT2 * 1000.0

    def test_custom_calibration(self):
        t = table_btc(MarketParams(1.0, 1.0), ratios=(1.0,))
        assert math.isclose(t.rows[0].subsidy_usd, 0.35355339059327373, rel_tol=1e-14)

    def test_csv_has_header(self):
        text = btc_table_to_csv(table_btc())
        assert text.startswith("sigma_eps_over_sigma_u,sigma_eps,subsidy_usd_per_day,fraction_of_sigma_v_sigma_u\n")


class TestSubsidyCurve:
    def test_endpoints_and_monotonicity(self):
        curve = subsidy_curve(UNIT, 5.0, 101)
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1][0] == 5.0
        assert round(curve.points[-1][1], 3) == 2.451
        subs = [s for _, s in curve.points]
        assert all(b > a for a, b in zip(subs, subs[1:]))

    def test_inflection_marker(self):
        curve = subsidy_curve(UNIT, 5.0, 11)
        assert curve.inflection == SQRT2
        assert round(privacy_subsidy(MarketParams(1.0, 1.0, curve.inflection)), 3) == 0.577

    def test_sidecar_and_csv(self):
        curve = subsidy_curve(UNIT, 2.0, 3)
        assert curve_to_csv(curve).startswith("sigma_eps,subsidy\n")
        sidecar = json.loads(curve_sidecar_json(curve))
        assert sidecar == {"inflection": SQRT2}

    @pytest.mark.parametrize("n,mx", [(1, 5.0), (2, 0.0), (2, -1.0)])
    def test_bad_inputs(self, n, mx):
        with pytest.raises(ValueError):
            subsidy_curve(UNIT, mx, n)


class TestFeeRevenueComparison:
    BTC_NOISY = MarketParams(3000.0, 1000.0, 1000.0)

    def test_btc_narrative(self):
        cmp = fee_revenue_comparison(self.BTC_NOISY, 1e9, 10.0)
        assert math.isclose(cmp.revenue_usd, 1e6, rel_tol=1e-12)
        assert math.isclose(cmp.subsidy_usd, 1060660.1717798212, rel_tol=1e-12)
        assert 5.0 <= cmp.shortfall_pct <= 7.0
        assert math.isclose(cmp.shortfall_pct, 6.066017177982116, rel_tol=1e-9)

    def test_zero_fee_means_shortfall_equals_subsidy(self):
        cmp = fee_revenue_comparison(self.BTC_NOISY, 1e9, 0.0)
        assert cmp.revenue_usd == 0.0
        assert cmp.shortfall_usd == cmp.subsidy_usd
        assert cmp.shortfall_pct is None

    def test_zero_noise_means_pure_surplus(self):
        cmp = fee_revenue_comparison(MarketParams(3000.0, 1000.0, 0.0), 1e9, 10.0)
        assert cmp.subsidy_usd == 0.0
        assert cmp.shortfall_usd == -cmp.revenue_usd

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            fee_revenue_comparison(self.BTC_NOISY, 0.0, 10.0)
        with pytest.raises(ValueError):
            fee_revenue_comparison(self.BTC_NOISY, 1e9, -1.0)


class TestReportBundle:
    def test_bundle_writes_and_verifies(self, tmp_path):
        result = write_report_bundle(tmp_path)
        assert result.ok, result.mismatches
        names = {p.split("/")[-1] for p in result.files}
        assert names == {"table1.csv", "table2.csv", "figure1.csv", "figure1.json", "fee_comparison.json"}
        for f in result.files:
            assert (tmp_path / f.split("/")[-1]).exists()

    def test_bundle_is_deterministic(self, tmp_path):
        write_report_bundle(tmp_path / "a")
        write_report_bundle(tmp_path / "b")
        for name in ("table1.csv", "table2.csv", "figure1.csv", "figure1.json", "fee_comparison.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_fee_comparison_payload(self, tmp_path):
        write_report_bundle(tmp_path)
        payload = json.loads((tmp_path / "fee_comparison.json").read_text())
        assert abs(payload["shortfall_pct"] - 6.07) < 0.01
        sidecar = json.loads((tmp_path / "figure1.json").read_text())
        assert abs(sidecar["inflection"] - 1.4142135623730951) < 1e-15


class TestRegimeLabels:
    @pytest.mark.parametrize("se,label", [
        (0.0, "textbook Kyle"),
        (0.5, "low-privacy regime"),
        (1.0, "sigma_eps = sigma_u"),
        (SQRT2, "inflection point"),
        (2.0, "past inflection"),
        (3.0, "high-privacy"),
        (5.0, "far high-privacy"),
    ])
    def test_labels(self, se, label):
        assert regime_label(se, 1.0) == label
