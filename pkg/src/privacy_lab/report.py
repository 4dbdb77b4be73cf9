"""Parameter sweeps and machine-readable report artifacts.

Emits CSV/JSON with deterministic bytes: floats carry 17 significant digits
(round-trip exact), rows follow the input order, and no timestamps or
environment data leak into the output.

CSV schemas
-----------
sweep:  sigma_eps,lambda,beta,pi_I,pi_N,pi_M,subsidy,d1,d2,fee_rate,note
curve:  sigma_eps,subsidy  (+ sidecar JSON {"inflection": value})
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .equilibrium import MarketParams, solve_closed_form, validate_params
from .welfare import (
    SQRT2,
    break_even_fee,
    privacy_subsidy,
    subsidy_analysis,
    welfare_decomposition,
)

SWEEP_CSV_COLUMNS = ("sigma_eps", "lambda", "beta", "pi_I", "pi_N", "pi_M", "subsidy", "d1", "d2", "fee_rate", "note")

OUTPUT_KINDS = frozenset({"equilibrium", "welfare", "subsidy_analysis", "fee"})

# Illustrative per-day BTC/USDT calibration: ~3% daily volatility on a
# $100k asset, and a 1,000 BTC/day noise-flow component.
BTC_SIGMA_V_USD = 3000.0
BTC_SIGMA_U_BTC = 1000.0
BTC_RATIOS = (0.1, 0.5, 1.0, SQRT2, 2.0)


def format_float(x: float) -> str:
    """17 significant digits: parses back to the identical double."""
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class SweepSpec:
    """A sweep over sigma_eps values at fixed base params.

    `outputs` selects which column groups get populated: any subset of
    {"equilibrium", "welfare", "subsidy_analysis", "fee"}.
    """

    params_base: MarketParams
    sigma_eps_values: tuple[float, ...]
    outputs: frozenset[str] = OUTPUT_KINDS

    def validated(self) -> "SweepSpec":
        validate_params(self.params_base)
        vals = tuple(float(v) for v in self.sigma_eps_values)
        if not vals:
            raise ValueError("sigma_eps_values must be non-empty")
        for v in vals:
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"sigma_eps values must be finite and >= 0, got {v!r}")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("sigma_eps_values must be strictly increasing")
        unknown = set(self.outputs) - OUTPUT_KINDS
        if unknown:
            raise ValueError(f"unknown outputs {sorted(unknown)}; valid: {sorted(OUTPUT_KINDS)}")
        if not self.outputs:
            raise ValueError("outputs must be non-empty")
        return SweepSpec(self.params_base, vals, frozenset(self.outputs))


@dataclass(frozen=True)
class ReportRow:
    """One sweep row; fields outside the requested output groups stay None."""

    sigma_eps: float
    note: str
    lam: float | None = None
    beta: float | None = None
    pi_I: float | None = None
    pi_N: float | None = None
    pi_M: float | None = None
    subsidy: float | None = None
    d1: float | None = None
    d2: float | None = None
    fee_rate: float | None = None


def regime_label(sigma_eps: float, sigma_u: float) -> str:
    """Human-readable regime tag for a sweep row."""
    ratio = sigma_eps / sigma_u
    if ratio == 0.0:
        return "textbook Kyle"
    if abs(ratio - 1.0) < 1e-12:
        return "sigma_eps = sigma_u"
    if abs(ratio - SQRT2) < 1e-12:
        return "inflection point"
    if ratio < SQRT2:
        return "low-privacy regime"
    if ratio < 2.5:
        return "past inflection"
    if ratio < 4.0:
        return "high-privacy"
    return "far high-privacy"


def sweep(spec: SweepSpec) -> list[ReportRow]:
    """One row per sigma_eps value, all closed form."""
    spec = spec.validated()
    rows = []
    for se in spec.sigma_eps_values:
        params = validate_params(replace(spec.params_base, sigma_eps=se))
        row = ReportRow(sigma_eps=se, note=regime_label(se, params.sigma_u))
        if "equilibrium" in spec.outputs:
            eq = solve_closed_form(params)
            row = replace(row, lam=eq.lam, beta=eq.beta)
        if "welfare" in spec.outputs:
            w = welfare_decomposition(params)
            row = replace(row, pi_I=w.pi_I, pi_N=w.pi_N, pi_M=w.pi_M, subsidy=-w.pi_M)
        if "subsidy_analysis" in spec.outputs:
            a = subsidy_analysis(params)
            row = replace(row, subsidy=a.subsidy, d1=a.d1, d2=a.d2)
        if "fee" in spec.outputs:
            row = replace(row, fee_rate=break_even_fee(params).fee_rate)
        rows.append(row)
    return rows


def sweep_to_csv(rows: list[ReportRow]) -> str:
    """Render sweep rows under the fixed schema; unpopulated cells are empty."""
    field_by_column = {"lambda": "lam", **{c: c for c in SWEEP_CSV_COLUMNS if c != "lambda"}}
    lines = [",".join(SWEEP_CSV_COLUMNS)]
    for row in rows:
        cells = []
        for column in SWEEP_CSV_COLUMNS:
            value = getattr(row, field_by_column[column])
            if value is None:
                cells.append("")
            elif column == "note":
                cells.append(value)
            else:
                cells.append(format_float(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BtcRow:
    ratio: float  # sigma_eps / sigma_u
    sigma_eps: float
    subsidy_usd: float
    fraction: float  # subsidy as a fraction of sigma_v * sigma_u


@dataclass(frozen=True)
class BtcTable:
    params_base: MarketParams
    rows: tuple[BtcRow, ...]


def table_btc(params_base: MarketParams | None = None, ratios: tuple[float, ...] = BTC_RATIOS) -> BtcTable:
    """Per-day subsidy in USD for the BTC/USDT calibration (overridable),
    at sigma_eps/sigma_u ratios including sqrt(2) generated symbolically."""
    if params_base is None:
        params_base = MarketParams(sigma_v=BTC_SIGMA_V_USD, sigma_u=BTC_SIGMA_U_BTC)
    validate_params(params_base)
    rows = []
    for ratio in ratios:
        se = ratio * params_base.sigma_u
        sub = privacy_subsidy(replace(params_base, sigma_eps=se))
        rows.append(
            BtcRow(
                ratio=ratio,
                sigma_eps=se,
                subsidy_usd=sub,
                fraction=sub / (params_base.sigma_v * params_base.sigma_u),
            )
        )
    return BtcTable(params_base=params_base, rows=tuple(rows))


def btc_table_to_csv(table: BtcTable) -> str:
    lines = ["sigma_eps_over_sigma_u,sigma_eps,subsidy_usd_per_day,fraction_of_sigma_v_sigma_u"]
    for r in table.rows:
        lines.append(",".join(format_float(v) for v in (r.ratio, r.sigma_eps, r.subsidy_usd, r.fraction)))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SubsidyCurve:
    points: tuple[tuple[float, float], ...]  # (sigma_eps, subsidy)
    inflection: float


def subsidy_curve(params: MarketParams, sigma_eps_max: float, n_points: int) -> SubsidyCurve:
    """Uniformly spaced samples of the subsidy over [0, sigma_eps_max],
    plus the inflection marker sqrt(2)*sigma_u."""
    validate_params(params)
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points!r}")
    if not (sigma_eps_max > 0 and math.isfinite(sigma_eps_max)):
        raise ValueError(f"sigma_eps_max must be finite and > 0, got {sigma_eps_max!r}")
    step = sigma_eps_max / (n_points - 1)
    points = []
    for i in range(n_points):
        se = sigma_eps_max if i == n_points - 1 else i * step
        points.append((se, privacy_subsidy(replace(params, sigma_eps=se))))
    return SubsidyCurve(points=tuple(points), inflection=SQRT2 * params.sigma_u)


def curve_to_csv(curve: SubsidyCurve) -> str:
    lines = ["sigma_eps,subsidy"]
    for se, sub in curve.points:
        lines.append(f"{format_float(se)},{format_float(sub)}")
    return "\n".join(lines) + "\n"


def curve_sidecar_json(curve: SubsidyCurve) -> str:
    return json.dumps({"inflection": curve.inflection}, sort_keys=True) + "\n"


@dataclass(frozen=True)
class FeeRevenueComparison:
    """Volume-fee revenue against the subsidy floor.

    shortfall_usd = subsidy - revenue (negative means surplus);
    shortfall_pct is relative to revenue, None when revenue is zero.
    """

    revenue_usd: float
    subsidy_usd: float
    shortfall_usd: float
    shortfall_pct: float | None


def fee_revenue_comparison(params: MarketParams, daily_volume_usd: float, fee_bps: float) -> FeeRevenueComparison:
    """Compare a fee of `fee_bps` basis points on `daily_volume_usd` of
    volume against the per-period subsidy the fee must cover."""
    validate_params(params)
    if not (daily_volume_usd > 0 and math.isfinite(daily_volume_usd)):
        raise ValueError(f"daily_volume_usd must be finite and > 0, got {daily_volume_usd!r}")
    if not (fee_bps >= 0 and math.isfinite(fee_bps)):
        raise ValueError(f"fee_bps must be finite and >= 0, got {fee_bps!r}")
    revenue = daily_volume_usd * (fee_bps / 1e4)
    sub = privacy_subsidy(params)
    shortfall = sub - revenue
    pct = 100.0 * shortfall / revenue if revenue > 0 else None
    return FeeRevenueComparison(
        revenue_usd=revenue,
        subsidy_usd=sub,
        shortfall_usd=shortfall,
        shortfall_pct=pct,
    )


def comparison_to_json(cmp: FeeRevenueComparison) -> str:
    payload = {
        "revenue_usd": cmp.revenue_usd,
        "subsidy_usd": cmp.subsidy_usd,
        "shortfall_usd": cmp.shortfall_usd,
        "shortfall_pct": cmp.shortfall_pct,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Reference bundle: the standard benchmark tables with pinned expected values.
# ---------------------------------------------------------------------------

TABLE1_SIGMA_EPS = (0.0, 0.5, 1.0, SQRT2, 2.0, 3.0, 5.0)

# (sigma_eps, lambda, beta, subsidy) rounded half-to-even to 3 decimals
TABLE1_EXPECTED = (
    (0.0, 0.500, 1.000, 0.000),
    (0.5, 0.447, 1.118, 0.112),
    (1.0, 0.354, 1.414, 0.354),
    (SQRT2, 0.289, 1.732, 0.577),
    (2.0, 0.224, 2.236, 0.894),
    (3.0, 0.158, 3.162, 1.423),
    (5.0, 0.098, 5.099, 2.451),
)

# (ratio, approximate subsidy USD/day within 1%, fraction to 3 decimals)
TABLE2_EXPECTED = (
    (0.1, 15_000.0, 0.005),
    (0.5, 335_000.0, 0.112),
    (1.0, 1_060_000.0, 0.354),
    (SQRT2, 1_730_000.0, 0.577),
    (2.0, 2_680_000.0, 0.894),
)

FEE_COMPARISON_VOLUME_USD = 1e9
FEE_COMPARISON_BPS = 10.0
FEE_COMPARISON_EXPECTED_SUBSIDY = 1.0607e6
FEE_COMPARISON_SHORTFALL_RANGE = (5.0, 7.0)

FIGURE1_MAX_SIGMA_EPS = 5.0
FIGURE1_POINTS = 101


@dataclass(frozen=True)
class BundleResult:
    files: tuple[str, ...]
    mismatches: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _parse_csv(text: str) -> list[dict[str, str]]:
    lines = text.strip("\n").split("\n")
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def write_report_bundle(outdir: str | Path) -> BundleResult:
    """Write table1.csv, table2.csv, figure1.csv (+ figure1.json sidecar) and
    fee_comparison.json into `outdir`, then re-read each artifact and verify
    it against the pinned expected values.  Returns the file list and any
    mismatch descriptions (empty means everything verified).
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    mismatches: list[str] = []
    files: list[str] = []

    def emit(name: str, text: str) -> Path:
        path = outdir / name
        path.write_text(text, newline="\n")
        files.append(str(path))
        return path

    unit = MarketParams(sigma_v=1.0, sigma_u=1.0)

    # table1: dimensionless sweep
    rows = sweep(SweepSpec(unit, TABLE1_SIGMA_EPS, frozenset({"equilibrium", "welfare"})))
    path = emit("table1.csv", sweep_to_csv(rows))
    parsed = _parse_csv(path.read_text())
    for rec, (se, lam_3, beta_3, sub_3) in zip(parsed, TABLE1_EXPECTED):
        got = (round(float(rec["lambda"]), 3), round(float(rec["beta"]), 3), round(float(rec["subsidy"]), 3))
        want = (lam_3, beta_3, sub_3)
        if got != want:
            mismatches.append(f"table1.csv sigma_eps={se:g}: got {got}, expected {want}")

    # table2: BTC calibration
    btc = table_btc()
    path = emit("table2.csv", btc_table_to_csv(btc))
    parsed = _parse_csv(path.read_text())
    for rec, (ratio, approx_usd, frac_3) in zip(parsed, TABLE2_EXPECTED):
        sub = float(rec["subsidy_usd_per_day"])
        if abs(sub - approx_usd) / approx_usd > 0.01:
            mismatches.append(f"table2.csv ratio={ratio:g}: subsidy {sub:.2f} not within 1% of {approx_usd:.0f}")
        if round(float(rec["fraction_of_sigma_v_sigma_u"]), 3) != frac_3:
            mismatches.append(f"table2.csv ratio={ratio:g}: fraction {rec['fraction_of_sigma_v_sigma_u']} != {frac_3}")

    # figure1: subsidy curve plus inflection sidecar
    curve = subsidy_curve(unit, FIGURE1_MAX_SIGMA_EPS, FIGURE1_POINTS)
    path = emit("figure1.csv", curve_to_csv(curve))
    emit("figure1.json", curve_sidecar_json(curve))
    parsed = _parse_csv(path.read_text())
    subs = [float(rec["subsidy"]) for rec in parsed]
    if subs[0] != 0.0:
        mismatches.append(f"figure1.csv: curve at sigma_eps=0 is {subs[0]!r}, expected 0")
    if any(b <= a for a, b in zip(subs, subs[1:])):
        mismatches.append("figure1.csv: curve is not strictly increasing")
    if round(subs[-1], 3) != 2.451:
        mismatches.append(f"figure1.csv: curve end {subs[-1]:.6f} does not round to 2.451")
    sidecar = json.loads((outdir / "figure1.json").read_text())
    if abs(sidecar["inflection"] - SQRT2) > 1e-15:
        mismatches.append(f"figure1.json: inflection {sidecar['inflection']!r} != sqrt(2)")
    at_inflection = privacy_subsidy(replace(unit, sigma_eps=curve.inflection))
    if round(at_inflection, 3) != 0.577:
        mismatches.append(f"figure1: subsidy at inflection {at_inflection:.6f} does not round to 0.577")

    # fee comparison at sigma_eps = sigma_u under the BTC calibration
    cmp = fee_revenue_comparison(
        replace(btc.params_base, sigma_eps=btc.params_base.sigma_u),
        FEE_COMPARISON_VOLUME_USD,
        FEE_COMPARISON_BPS,
    )
    path = emit("fee_comparison.json", comparison_to_json(cmp))
    loaded = json.loads(path.read_text())
    if abs(loaded["revenue_usd"] - 1e6) > 1e-3:
        mismatches.append(f"fee_comparison.json: revenue {loaded['revenue_usd']!r} != 1e6")
    if abs(loaded["subsidy_usd"] - FEE_COMPARISON_EXPECTED_SUBSIDY) / FEE_COMPARISON_EXPECTED_SUBSIDY > 0.01:
        mismatches.append(
            f"fee_comparison.json: subsidy {loaded['subsidy_usd']:.2f} not within 1% of "
            f"{FEE_COMPARISON_EXPECTED_SUBSIDY:.0f}"
        )
    lo, hi = FEE_COMPARISON_SHORTFALL_RANGE
    if not (lo <= loaded["shortfall_pct"] <= hi):
        mismatches.append(f"fee_comparison.json: shortfall_pct {loaded['shortfall_pct']:.3f} outside [{lo}, {hi}]")

    return BundleResult(files=tuple(files), mismatches=tuple(mismatches))
