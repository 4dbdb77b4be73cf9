"""Per-agent welfare accounting and the break-even fee under privacy noise.

All quantities are per-period expectations at the closed-form equilibrium.
The maker prices on a signal strictly coarser than the executed flow, so it
runs an expected loss pi_M <= 0 against that flow; |pi_M| is the transfer
from the protocol/LP pool to traders and doubles as the fee floor any
privacy-aggregated exchange must collect to break even.

Sign convention: pi_M is the maker's (non-positive) profit; the subsidy is
-pi_M >= 0.  Both are exposed to keep signs unambiguous across modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .equilibrium import MarketParams, combined_noise_std, solve_closed_form, validate_params

# E|X| = std * sqrt(2/pi) for a centered Gaussian X
ABS_MOMENT_COEF = math.sqrt(2.0 / math.pi)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class WelfareDecomposition:
    """Expected per-period P&L of each agent; the three sum to zero.

    pi_I: informed trader (>= 0), pi_N: noise traders (<= 0),
    pi_M: maker/protocol (<= 0, zero iff sigma_eps = 0).
    """

    pi_I: float
    pi_N: float
    pi_M: float


@dataclass(frozen=True)
class SubsidyAnalysis:
    """Shape of the subsidy |pi_M| as a function of sigma_eps.

    d1/d2 are the first/second derivatives in sigma_eps; the curve is convex
    below `inflection` = sqrt(2)*sigma_u and concave above it.
    `low_privacy_coeff` is the quadratic small-noise coefficient
    sigma_v/(2*sigma_u); `high_privacy_slope` is the linear large-noise slope
    sigma_v/2.
    """

    subsidy: float
    d1: float
    d2: float
    inflection: float
    low_privacy_coeff: float
    high_privacy_slope: float


@dataclass(frozen=True)
class FeeBreakEven:
    """Volume-proportional break-even fee and its incidence.

    fee_rate = subsidy / (E|x| + E|u|); charged on expected absolute volumes
    it exactly cancels each trader type's gain over the no-privacy baseline,
    so the net P&L reverts to +/- sigma_v*sigma_u/2.
    """

    e_abs_x: float
    e_abs_u: float
    q_total: float
    fee_rate: float
    fee_on_informed: float
    fee_on_noise: float
    net_pi_I: float
    net_pi_N: float


def welfare_decomposition(params: MarketParams) -> WelfareDecomposition:
    """Closed-form per-agent expected P&L at equilibrium.

    pi_I = sigma_v*s/2, pi_N = -sigma_v*sigma_u^2/(2s),
    pi_M = -sigma_v*sigma_eps^2/(2s), with s = sqrt(sigma_u^2 + sigma_eps^2).
    """
    validate_params(params)
    s = combined_noise_std(params)
    return WelfareDecomposition(
        pi_I=0.5 * params.sigma_v * s,
        pi_N=-params.sigma_v * params.sigma_u**2 / (2.0 * s),
        pi_M=-params.sigma_v * params.sigma_eps**2 / (2.0 * s),
    )


def welfare_at(params: MarketParams, lam: float, beta: float) -> WelfareDecomposition:
    """Expected P&L triple when the maker prices at slope `lam` and the
    trader uses coefficient `beta`, not necessarily the equilibrium pair.

    Used to predict what a simulation with a perturbed strategy should
    report.  At the equilibrium pair this reduces to welfare_decomposition.
    """
    validate_params(params)
    if lam <= 0 or beta <= 0:
        raise ValueError(f"lam and beta must be > 0, got lam={lam!r}, beta={beta!r}")
    sv2 = params.sigma_v**2
    pi_I = beta * sv2 * (1.0 - lam * beta)
    pi_N = -lam * params.sigma_u**2
    pi_M = lam * (beta**2 * sv2 + params.sigma_u**2) - beta * sv2
    return WelfareDecomposition(pi_I=pi_I, pi_N=pi_N, pi_M=pi_M)


def privacy_subsidy(params: MarketParams) -> float:
    """Per-period transfer |pi_M| = sigma_v*sigma_eps^2/(2*sqrt(sigma_u^2+sigma_eps^2))
    from the protocol/LP pool to traders; zero iff sigma_eps = 0.
    """
    validate_params(params)
    s = combined_noise_std(params)
    return params.sigma_v * params.sigma_eps**2 / (2.0 * s)


def subsidy_analysis(params: MarketParams) -> SubsidyAnalysis:
    """Subsidy level, analytic derivatives in sigma_eps, and regime markers.

    d1 = sigma_v*sigma_eps*(2*sigma_u^2 + sigma_eps^2) / (2*(sigma_u^2+sigma_eps^2)^(3/2))
    d2 = sigma_v*sigma_u^2*(2*sigma_u^2 - sigma_eps^2) / (2*(sigma_u^2+sigma_eps^2)^(5/2))

    d1 > 0 for sigma_eps > 0, and d2 changes sign exactly at
    sigma_eps = sqrt(2)*sigma_u.
    """
    validate_params(params)
    sv, su, se = params.sigma_v, params.sigma_u, params.sigma_eps
    s2 = su**2 + se**2
    return SubsidyAnalysis(
        subsidy=privacy_subsidy(params),
        d1=sv * se * (2.0 * su**2 + se**2) / (2.0 * s2**1.5),
        d2=sv * su**2 * (2.0 * su**2 - se**2) / (2.0 * s2**2.5),
        inflection=SQRT2 * su,
        low_privacy_coeff=sv / (2.0 * su),
        high_privacy_slope=0.5 * sv,
    )


def noise_pnl_derivative(params: MarketParams) -> float:
    """d pi_N / d sigma_eps = sigma_v*sigma_u^2*sigma_eps / (2*(sigma_u^2+sigma_eps^2)^(3/2)).

    Strictly positive for sigma_eps > 0: noise traders lose less as the
    maker's signal gets coarser.
    """
    validate_params(params)
    sv, su, se = params.sigma_v, params.sigma_u, params.sigma_eps
    return sv * su**2 * se / (2.0 * (su**2 + se**2) ** 1.5)


def incremental_gains(params: MarketParams) -> tuple[float, float]:
    """Exact gains of each trader type over the sigma_eps = 0 baseline.

    informed: pi_I(sigma_eps) - pi_I(0) = sigma_v*(s - sigma_u)/2
    noise:    pi_N(sigma_eps) - pi_N(0) = sigma_v*sigma_u*(s - sigma_u)/(2s)

    with s = sqrt(sigma_u^2 + sigma_eps^2).  Evaluated through the
    rationalized form s - sigma_u = sigma_eps^2/(s + sigma_u), which avoids
    the cancellation the naive difference suffers for small sigma_eps.
    """
    validate_params(params)
    s = combined_noise_std(params)
    # s - sigma_u == sigma_eps^2 / (s + sigma_u), exactly
    gap = params.sigma_eps**2 / (s + params.sigma_u)
    informed = 0.5 * params.sigma_v * gap
    noise = params.sigma_v * params.sigma_u * gap / (2.0 * s)
    return informed, noise


def break_even_fee(params: MarketParams) -> FeeBreakEven:
    """Break-even volume-proportional fee and the net-of-fee P&L.

    Expected absolute volumes at equilibrium are
    E|x| = (sigma_v/(2*lam))*sqrt(2/pi) and E|u| = sigma_u*sqrt(2/pi);
    the break-even rate is f = |pi_M| / (E|x| + E|u|).
    """
    validate_params(params)
    eq = solve_closed_form(params)
    w = welfare_decomposition(params)
    subsidy = -w.pi_M
    e_abs_x = (params.sigma_v / (2.0 * eq.lam)) * ABS_MOMENT_COEF
    e_abs_u = params.sigma_u * ABS_MOMENT_COEF
    q_total = e_abs_x + e_abs_u
    fee_rate = subsidy / q_total
    fee_on_informed = fee_rate * e_abs_x
    fee_on_noise = fee_rate * e_abs_u
    return FeeBreakEven(
        e_abs_x=e_abs_x,
        e_abs_u=e_abs_u,
        q_total=q_total,
        fee_rate=fee_rate,
        fee_on_informed=fee_on_informed,
        fee_on_noise=fee_on_noise,
        net_pi_I=w.pi_I - fee_on_informed,
        net_pi_N=w.pi_N - fee_on_noise,
    )
