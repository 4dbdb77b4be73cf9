import math

import numpy as np
import pytest

from privacy_lab import (
    BatchParams,
    MarketParams,
    NegativeSigmaEps,
    NoConvergence,
    NonFiniteInput,
    NonPositiveSigmaU,
    NonPositiveSigmaV,
    SolveMethod,
    batched_equilibrium,
    informed_best_response,
    informed_expected_profit,
    posterior_price,
    posterior_slope,
    solve_closed_form,
    solve_fixed_point,
    validate_params,
    zero_profit_lambda_unconditional,
)

SQRT2 = math.sqrt(2.0)


class TestValidation:
    def test_ok(self):
        p = MarketParams(1.0, 1.0, 0.0, p0=0.0)
        assert validate_params(p) is p

    def test_negative_p0_and_zero_sigma_eps_are_fine(self):
        validate_params(MarketParams(2.5, 0.1, 0.0, p0=-10.0))

    def test_zero_sigma_u(self):
        with pytest.raises(NonPositiveSigmaU) as exc:
            validate_params(MarketParams(1.0, 0.0, 1.0))
        assert exc.value.field == "sigma_u"
        assert "sigma_u" in str(exc.value)

    def test_negative_sigma_eps(self):
        with pytest.raises(NegativeSigmaEps) as exc:
            validate_params(MarketParams(1.0, 1.0, -0.5))
        assert exc.value.field == "sigma_eps"

    def test_non_positive_sigma_v(self):
        with pytest.raises(NonPositiveSigmaV):
            validate_params(MarketParams(0.0, 1.0, 0.0))
        with pytest.raises(NonPositiveSigmaV):
            validate_params(MarketParams(-3.0, 1.0, 0.0))

    @pytest.mark.parametrize("field,params", [
        ("sigma_v", MarketParams(math.nan, 1.0, 0.0)),
        ("sigma_u", MarketParams(1.0, math.inf, 0.0)),
        ("sigma_eps", MarketParams(1.0, 1.0, math.nan)),
        ("p0", MarketParams(1.0, 1.0, 0.0, p0=math.inf)),
    ])
    def test_non_finite(self, field, params):
        with pytest.raises(NonFiniteInput) as exc:
            validate_params(params)
        assert exc.value.field == field


class TestClosedForm:
    def test_no_privacy_is_classical_kyle_exactly(self):
        eq = solve_closed_form(MarketParams(1.0, 1.0, 0.0))
        assert eq.lam == 0.5
        assert eq.beta == 1.0
        assert eq.method is SolveMethod.CLOSED_FORM

    def test_unit_market_values(self):
        eq = solve_closed_form(MarketParams(1.0, 1.0, 1.0))
        assert math.isclose(eq.lam, 0.35355339059327373, rel_tol=1e-15)
        assert math.isclose(eq.beta, SQRT2, rel_tol=1e-15)

        eq2 = solve_closed_form(MarketParams(1.0, 1.0, 2.0))
        assert math.isclose(eq2.lam, 0.22360679774997896, rel_tol=1e-15)
        assert math.isclose(eq2.beta, 2.23606797749979, rel_tol=1e-15)

    def test_classical_limit_is_exact_for_any_scale(self):
        for sv, su in [(1.0, 1.0), (3000.0, 1000.0), (0.002, 17.0)]:
            eq = solve_closed_form(MarketParams(sv, su, 0.0))
            assert eq.lam == sv / (2.0 * su)
            assert eq.beta == su / sv

    def test_half_revealing_identity_on_grid(self, grid1000):
        for p in grid1000:
            eq = solve_closed_form(p)
            assert abs(eq.lam * eq.beta - 0.5) <= 1e-12 * 0.5

    def test_monotone_in_sigma_eps(self):
        for sv, su in [(1.0, 1.0), (3000.0, 1000.0), (0.01, 5.0)]:
            lams, betas = [], []
            for se in [0.0, 0.25 * su, su, 2.0 * su, 10.0 * su]:
                eq = solve_closed_form(MarketParams(sv, su, se))
                lams.append(eq.lam)
                betas.append(eq.beta)
            assert all(b < a for a, b in zip(lams, lams[1:]))
            assert all(b > a for a, b in zip(betas, betas[1:]))


class TestFixedPoint:
    def test_agrees_with_closed_form_on_grid(self, grid1000):
        for p in grid1000:
            lam_cf = solve_closed_form(p).lam
            fp = solve_fixed_point(p)
            assert abs(fp.lam - lam_cf) / lam_cf <= 1e-12
            assert fp.method is SolveMethod.FIXED_POINT

    def test_unit_market(self):
        fp = solve_fixed_point(MarketParams(1.0, 1.0, 1.0), tol=1e-12)
        assert abs(fp.lam - 0.35355339059327373) / 0.35355339059327373 <= 1e-12

    def test_large_scale(self):
        fp = solve_fixed_point(MarketParams(3000.0, 1000.0, 1000.0))
        expected = 3000.0 / (2.0 * SQRT2 * 1000.0)
        assert abs(fp.lam - expected) / expected <= 1e-12

    def test_no_privacy_limit(self):
        fp = solve_fixed_point(MarketParams(1.0, 1.0, 0.0))
        assert abs(fp.lam - 0.5) <= 1e-12 * 0.5

    def test_beta_is_best_response_to_lam(self):
        fp = solve_fixed_point(MarketParams(2.0, 0.5, 1.5))
        assert fp.beta == 1.0 / (2.0 * fp.lam)

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            solve_fixed_point(MarketParams(1.0, 1.0, 1.0), tol=0.0)

    def test_no_convergence_budget(self):
        with pytest.raises(NoConvergence) as exc:
            solve_fixed_point(MarketParams(1.0, 1.0, 1.0), tol=1e-300, max_iter=10)
        assert exc.value.max_iter == 10


class TestPosteriorPrice:
    def test_zero_signal_returns_prior(self):
        for p0 in [0.0, 100.0, -7.5]:
            p = MarketParams(1.3, 0.8, 0.4, p0=p0)
            assert posterior_price(p, beta=1.0, y_tilde=0.0) == p0

    def test_unit_case(self):
        assert posterior_price(MarketParams(1.0, 1.0, 0.0), beta=1.0, y_tilde=1.0) == 0.5

    def test_shifted_case(self):
        p = MarketParams(1.0, 1.0, 1.0, p0=100.0)
        got = posterior_price(p, beta=SQRT2, y_tilde=2.0)
        assert math.isclose(got, 100.70710678118655, rel_tol=1e-14)

    def test_rejects_non_positive_beta(self):
        with pytest.raises(ValueError):
            posterior_price(MarketParams(1.0, 1.0, 0.0), beta=0.0, y_tilde=1.0)

    def test_slope_at_equilibrium_beta_equals_lam(self, grid1000):
        # pricing consistency: the projection slope at the equilibrium
        # trader coefficient reproduces the equilibrium price impact
        for p in grid1000:
            eq = solve_closed_form(p)
            slope = posterior_slope(p, eq.beta)
            assert abs(slope - eq.lam) / eq.lam <= 1e-12


class TestInformedTrader:
    def test_no_edge_no_trade(self):
        assert informed_best_response(0.7, p0=3.0, v=3.0) == 0.0

    def test_best_response_values(self):
        assert informed_best_response(0.5, 0.0, 1.0) == 1.0
        got = informed_best_response(0.35355339059327373, 0.0, 1.0)
        assert math.isclose(got, SQRT2, rel_tol=1e-14)

    def test_profit_values(self):
        assert informed_expected_profit(0.5, 0.0, 1.0, 0.0) == 0.0
        assert informed_expected_profit(0.5, 0.0, 1.0, 1.0) == 0.5
        assert informed_expected_profit(0.5, 0.0, 1.0, 2.0) == 0.0

    def test_rejects_non_positive_lam(self):
        with pytest.raises(ValueError):
            informed_best_response(0.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            informed_expected_profit(-1.0, 0.0, 1.0, 1.0)

    def test_profit_peaks_at_grid_point_nearest_best_response(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            lam = 10.0 ** rng.uniform(-2, 2)
            p0 = rng.normal(0.0, 5.0)
            v = p0 + rng.normal(0.0, 3.0)
            x_star = informed_best_response(lam, p0, v)
            width = max(1.0, abs(x_star))
            offset = rng.uniform(-0.3, 0.3) * width
            grid = np.linspace(x_star - width + offset, x_star + width + offset, 10_001)
            profits = [informed_expected_profit(lam, p0, v, float(x)) for x in grid]
            assert int(np.argmax(profits)) == int(np.argmin(np.abs(grid - x_star)))


class TestZeroProfitRule:
    def test_independent_of_sigma_eps(self):
        assert zero_profit_lambda_unconditional(MarketParams(1.0, 1.0, 3.0)) == 0.5
        assert zero_profit_lambda_unconditional(MarketParams(1.0, 1.0, 0.0)) == 0.5

    def test_scale(self):
        assert zero_profit_lambda_unconditional(MarketParams(3000.0, 1000.0, 500.0)) == 1.5

    def test_coincides_with_equilibrium_when_no_coarsening(self):
        p = MarketParams(2.7, 0.4, 0.0)
        assert zero_profit_lambda_unconditional(p) == solve_closed_form(p).lam


class TestBatchedEquilibrium:
    def test_single_period_batch_is_the_plain_market(self):
        base = MarketParams(1.7, 0.6, 0.0, p0=2.0)
        one = batched_equilibrium(BatchParams(base, 1))
        plain = solve_closed_form(base)
        assert (one.lam, one.beta) == (plain.lam, plain.beta)

    def test_unit_market_tau_4(self):
        eq = batched_equilibrium(BatchParams(MarketParams(1.0, 1.0), 4))
        assert eq.lam == 0.25
        assert eq.beta == 2.0

    def test_scale_tau_9(self):
        eq = batched_equilibrium(BatchParams(MarketParams(3000.0, 1000.0), 9))
        assert eq.lam == 0.5

    def test_privacy_noise_in_base_is_ignored(self):
        # the batch aggregate is observed exactly, so sigma_eps drops out
        a = batched_equilibrium(BatchParams(MarketParams(1.0, 1.0, 5.0), 4))
        b = batched_equilibrium(BatchParams(MarketParams(1.0, 1.0, 0.0), 4))
        assert (a.lam, a.beta) == (b.lam, b.beta)

    @pytest.mark.parametrize("tau", [0, -1, 2.5])
    def test_bad_tau(self, tau):
        with pytest.raises(ValueError):
            batched_equilibrium(BatchParams(MarketParams(1.0, 1.0), tau))
