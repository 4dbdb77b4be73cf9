"""Linear equilibrium of the one-period trading game with a privacy-noised maker.

One informed trader observes the terminal value v ~ N(p0, sigma_v^2) and
submits x = beta*(v - p0); noise traders add u ~ N(0, sigma_u^2); the market
maker prices the flow signal it observes, which is y_tilde = x + u + eps with
independent privacy noise eps ~ N(0, sigma_eps^2), at the posterior mean
p = p0 + lambda*y_tilde.

The module solves for the equilibrium pair (lambda, beta) two independent
ways: in closed form, and numerically as the fixed point of the posterior
projection composed with the trader's best response.  The fixed-point route
never touches the closed form, so the two can cross-check each other.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import (
    NegativeSigmaEps,
    NoConvergence,
    NonFiniteInput,
    NonPositiveSigmaU,
    NonPositiveSigmaV,
)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200


@dataclass(frozen=True)
class MarketParams:
    """Model primitives.

    sigma_v: std dev of the terminal value (currency units), > 0.
    sigma_u: std dev of the noise-trader flow (asset units), > 0.
    sigma_eps: std dev of the additive privacy noise on the maker's
        flow observation (asset units), >= 0.  Zero means the maker
        sees the executed flow exactly.
    p0: common prior mean of the value; only differences v - p0 enter
        the math, so any finite level (including 0 or negative) is fine.
    """

    sigma_v: float
    sigma_u: float
    sigma_eps: float = 0.0
    p0: float = 0.0


class SolveMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    FIXED_POINT = "fixed_point"


@dataclass(frozen=True)
class Equilibrium:
    """A linear-equilibrium pair: price-impact slope and trader coefficient.

    `method` records which solver produced it so reports can show
    oracle cross-checks.  Solver outputs satisfy lam * beta = 1/2; a
    deliberately perturbed copy (for off-equilibrium simulation) need not.
    """

    lam: float
    beta: float
    method: SolveMethod


@dataclass(frozen=True)
class BatchParams:
    """A batched market: `tau` periods of noise flow clear at one price."""

    base: MarketParams
    tau: int


def validate_params(raw: MarketParams) -> MarketParams:
    """Check primitives; return them unchanged or raise. Never clamps.

    Raises NonFiniteInput / NonPositiveSigmaV / NonPositiveSigmaU /
    NegativeSigmaEps, each naming the offending field.
    """
    for field in ("p0", "sigma_v", "sigma_u", "sigma_eps"):
        value = getattr(raw, field)
        if not math.isfinite(value):
            raise NonFiniteInput(field, value)
    if raw.sigma_v <= 0:
        raise NonPositiveSigmaV(raw.sigma_v)
    if raw.sigma_u <= 0:
        raise NonPositiveSigmaU(raw.sigma_u)
    if raw.sigma_eps < 0:
        raise NegativeSigmaEps(raw.sigma_eps)
    return raw


def combined_noise_std(params: MarketParams) -> float:
    """Std dev of the non-informed part u + eps of the observed flow."""
    return math.hypot(params.sigma_u, params.sigma_eps)


def solve_closed_form(params: MarketParams) -> Equilibrium:
    """Closed-form equilibrium: lam = sigma_v / (2*sqrt(sigma_u^2 + sigma_eps^2)),
    beta = sqrt(sigma_u^2 + sigma_eps^2) / sigma_v.
    """
    validate_params(params)
    s = combined_noise_std(params)
    return Equilibrium(
        lam=params.sigma_v / (2.0 * s),
        beta=s / params.sigma_v,
        method=SolveMethod.CLOSED_FORM,
    )


def posterior_slope(params: MarketParams, beta: float) -> float:
    """Slope of E[v | y_tilde] in y_tilde when the trader uses coefficient beta.

    The Gaussian projection gives beta*sigma_v^2 / (beta^2*sigma_v^2 +
    sigma_u^2 + sigma_eps^2).
    """
    sv2 = params.sigma_v**2
    return beta * sv2 / (beta**2 * sv2 + params.sigma_u**2 + params.sigma_eps**2)


def posterior_price(params: MarketParams, beta: float, y_tilde: float) -> float:
    """Posterior-mean price p0 + slope * y_tilde for a conjectured beta."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta!r}")
    return params.p0 + posterior_slope(params, beta) * y_tilde


def informed_best_response(lam: float, p0: float, v: float) -> float:
    """Profit-maximizing order size (v - p0) / (2*lam) given price impact lam."""
    if lam <= 0:
        raise ValueError(f"lam must be > 0, got {lam!r}")
    return (v - p0) / (2.0 * lam)


def informed_expected_profit(lam: float, p0: float, v: float, x: float) -> float:
    """Expected profit (v - p0)*x - lam*x^2 of an order x, conditional on v.

    Strictly concave in x; the peak is at informed_best_response(lam, p0, v).
    """
    if lam <= 0:
        raise ValueError(f"lam must be > 0, got {lam!r}")
    return (v - p0) * x - lam * x**2


def zero_profit_lambda_unconditional(params: MarketParams) -> float:
    """Price-impact slope sigma_v / (2*sigma_u) that breaks even against the
    *executed* flow, independent of sigma_eps.

    Exposed for comparison output only: a maker that sees only the noisy
    signal cannot implement this rule (its quote is not the posterior mean,
    so a rival quoting the posterior would undercut it).  No equilibrium
    claim is attached.
    """
    validate_params(params)
    return params.sigma_v / (2.0 * params.sigma_u)


def solve_fixed_point(
    params: MarketParams,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Equilibrium:
    """Solve the equilibrium numerically, independent of the closed form.

    Bisects h(lam) = lam - posterior_slope(params, 1/(2*lam)) on the bracket
    [sigma_v / (20*(sigma_u + sigma_eps + sigma_v)), 10*sigma_v / (2*sigma_u)],
    where h is continuous and changes sign for all valid params.  `tol` is
    relative: the result satisfies |lam - lam_true| <= tol * lam_true.
    """
    validate_params(params)
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")

    def h(lam: float) -> float:
        return lam - posterior_slope(params, 1.0 / (2.0 * lam))

    lo = params.sigma_v / (20.0 * (params.sigma_u + params.sigma_eps + params.sigma_v))
    hi = 10.0 * params.sigma_v / (2.0 * params.sigma_u)
    h_lo = h(lo)
    if h_lo == 0.0:
        return Equilibrium(lam=lo, beta=1.0 / (2.0 * lo), method=SolveMethod.FIXED_POINT)

    for _ in range(max_iter):
        lam = 0.5 * (lo + hi)
        h_mid = h(lam)
        if h_mid == 0.0:
            break
        if (h_mid > 0.0) == (h_lo > 0.0):
            lo, h_lo = lam, h_mid
        else:
            hi = lam
        if hi - lo <= tol * lo:
            lam = 0.5 * (lo + hi)
            break
    else:
        raise NoConvergence(max_iter)

    return Equilibrium(lam=lam, beta=1.0 / (2.0 * lam), method=SolveMethod.FIXED_POINT)


def batched_equilibrium(bp: BatchParams) -> Equilibrium:
    """Equilibrium of the batched market: one batch clears tau periods of
    noise flow at a single price against the exact aggregate.

    Equivalent to the no-privacy market with sigma_u rescaled to
    sigma_u*sqrt(tau): lam = sigma_v / (2*sigma_u*sqrt(tau)),
    beta = sigma_u*sqrt(tau) / sigma_v.
    """
    if not isinstance(bp.tau, int) or bp.tau < 1:
        raise ValueError(f"tau must be an integer >= 1, got {bp.tau!r}")
    base = validate_params(bp.base)
    rescaled = MarketParams(
        sigma_v=base.sigma_v,
        sigma_u=base.sigma_u * math.sqrt(bp.tau),
        sigma_eps=0.0,
        p0=base.p0,
    )
    return solve_closed_form(rescaled)
