"""Market-maker equilibrium and welfare analysis under additive Gaussian
privacy noise on the maker's order-flow observation.

Closed forms for the linear equilibrium, the per-agent welfare decomposition,
the privacy subsidy (the maker's expected loss against the executed flow) and
its break-even fee, all cross-checked by an independent fixed-point solver
and a seeded Monte Carlo simulation of the one-period game.
"""

from .equilibrium import (
    BatchParams,
    Equilibrium,
    MarketParams,
    SolveMethod,
    batched_equilibrium,
    combined_noise_std,
    informed_best_response,
    informed_expected_profit,
    posterior_price,
    posterior_slope,
    solve_closed_form,
    solve_fixed_point,
    validate_params,
    zero_profit_lambda_unconditional,
)
from .errors import (
    InconclusiveResolution,
    NegativeSigmaEps,
    NoConvergence,
    NonFiniteInput,
    NonPositiveSigmaU,
    NonPositiveSigmaV,
    ParamError,
    PrivacyLabError,
    ResourceLimit,
)
from .montecarlo import (
    BestResponseCheck,
    PathRealization,
    PathSample,
    PriceMomentEstimate,
    SimConfig,
    SlopeEstimate,
    WelfareEstimate,
    estimate_lambda_regression,
    estimate_price_moments,
    estimate_welfare,
    simulate,
    simulate_batched,
    verify_best_response,
)
from .report import (
    BtcTable,
    FeeRevenueComparison,
    ReportRow,
    SubsidyCurve,
    SweepSpec,
    fee_revenue_comparison,
    subsidy_curve,
    sweep,
    table_btc,
    write_report_bundle,
)
from .welfare import (
    FeeBreakEven,
    SubsidyAnalysis,
    WelfareDecomposition,
    break_even_fee,
    incremental_gains,
    noise_pnl_derivative,
    privacy_subsidy,
    subsidy_analysis,
    welfare_at,
    welfare_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "BatchParams",
    "BestResponseCheck",
    "BtcTable",
    "Equilibrium",
    "FeeBreakEven",
    "FeeRevenueComparison",
    "InconclusiveResolution",
    "MarketParams",
    "NegativeSigmaEps",
    "NoConvergence",
    "NonFiniteInput",
    "NonPositiveSigmaU",
    "NonPositiveSigmaV",
    "ParamError",
    "PathRealization",
    "PathSample",
    "PriceMomentEstimate",
    "PrivacyLabError",
    "ReportRow",
    "ResourceLimit",
    "SimConfig",
    "SlopeEstimate",
    "SolveMethod",
    "SubsidyAnalysis",
    "SubsidyCurve",
    "SweepSpec",
    "WelfareDecomposition",
    "WelfareEstimate",
    "batched_equilibrium",
    "break_even_fee",
    "combined_noise_std",
    "estimate_lambda_regression",
    "estimate_price_moments",
    "estimate_welfare",
    "fee_revenue_comparison",
    "incremental_gains",
    "informed_best_response",
    "informed_expected_profit",
    "noise_pnl_derivative",
    "posterior_price",
    "posterior_slope",
    "privacy_subsidy",
    "simulate",
    "simulate_batched",
    "solve_closed_form",
    "solve_fixed_point",
    "subsidy_analysis",
    "subsidy_curve",
    "sweep",
    "table_btc",
    "validate_params",
    "verify_best_response",
    "welfare_at",
    "welfare_decomposition",
    "write_report_bundle",
    "zero_profit_lambda_unconditional",
]
