import datetime as dt

import numpy as np
import pytest

from homebound.betareg import (
    BetaRegFit,
    CovariateDesign,
    adjust_boundary_responses,
    beta_density_params,
    beta_log_density,
    betareg_fit,
    covariate_design_from_records,
    format_fit_table,
    fit_from_dict,
    fit_to_dict,
    log_likelihood,
    log_likelihood_gradient,
    predict_mean,
)
from homebound.errors import BoundaryResponseError, DataError, DomainError

from tests.oracles import finite_difference_gradient


def simulate_design(seed, n=1500, coefficients=(1.0, -0.5), phi=10.0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(size=n)
    eta = coefficients[0] + coefficients[1] * x
    mu = 1.0 / (1.0 + np.exp(-eta))
    y = rng.beta(mu * phi, (1.0 - mu) * phi)
    y = np.clip(y, 1e-9, 1 - 1e-9)
    return CovariateDesign(covariates=x[:, None], response=y, covariate_names=("x",))


class TestBetaDensityParams:
    def test_uniform_special_case(self):
        assert beta_density_params(0.5, 2.0) == pytest.approx((1.0, 1.0))

    def test_reference_white_block_shapes(self):
        alpha, beta = beta_density_params(0.718, 14.5)
        assert (alpha, beta) == pytest.approx((10.411, 4.089))

    def test_variance_formula(self):
        alpha, beta = beta_density_params(0.5, 999.0)
        variance = alpha * beta / ((alpha + beta) ** 2 * (alpha + beta + 1.0))
        assert variance == pytest.approx(0.25 / 1000.0, rel=1e-12)

    def test_sampling_oracle_mean(self):
        alpha, beta = beta_density_params(0.718, 14.5)
        rng = np.random.default_rng(12)
        draws = rng.beta(alpha, beta, size=1_000_000)
        assert abs(draws.mean() - 0.718) < 0.002

    def test_density_integrates_to_one(self):
        # parameter sets with both shapes >= 1, so the density is bounded
        # and the trapezoid quadrature converges
        y = np.linspace(1e-9, 1.0 - 1e-9, 400_001)
        for mean, phi in [(0.718, 14.5), (0.3, 8.0), (0.5, 50.0)]:
            density = np.exp(beta_log_density(y, mean, phi))
            integral = np.trapezoid(density, y)
            assert integral == pytest.approx(1.0, abs=1e-6)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            beta_density_params(0.0, 5.0)
        with pytest.raises(DomainError):
            beta_density_params(0.5, 0.0)


class TestFit:
    def test_synthetic_recovery(self):
        design = simulate_design(seed=11, n=5000)
        fit = betareg_fit(design)
        assert fit.converged
        assert fit.coefficients == pytest.approx([1.0, -0.5], abs=0.05)
        assert fit.precision_phi == pytest.approx(10.0, rel=0.10)

    def test_intercept_only_symmetric_data(self):
        rng = np.random.default_rng(1)
        y = np.clip(0.5 + 0.1 * rng.standard_normal(400), 0.05, 0.95)
        y = np.concatenate([y, 1.0 - y])  # exactly symmetric around 0.5
        design = CovariateDesign(covariates=np.empty((800, 0)), response=y)
        fit = betareg_fit(design)
        assert predict_mean(fit, []) == pytest.approx(0.5, abs=1e-6)
        assert fit.coefficients[0] == pytest.approx(0.0, abs=1e-5)

    def test_fitted_mean_within_observed_range(self):
        rng = np.random.default_rng(2)
        y = rng.uniform(0.55, 0.8, size=200)
        design = CovariateDesign(covariates=np.empty((200, 0)), response=y)
        fit = betareg_fit(design)
        assert y.min() < predict_mean(fit, []) < y.max()

    def test_gradient_matches_finite_differences(self):
        design = simulate_design(seed=3, n=400)
        rng = np.random.default_rng(4)
        for _ in range(5):
            theta = np.array([rng.normal(0.8, 0.3), rng.normal(-0.4, 0.3), rng.normal(2.0, 0.3)])

            def loglik_at(t):
                return log_likelihood(design, t[:-1], float(np.exp(t[-1])))

            analytic = log_likelihood_gradient(design, theta[:-1], float(np.exp(theta[-1])))
            numeric = finite_difference_gradient(loglik_at, theta, step=1e-6)
            scale = np.maximum(np.abs(numeric), 1e-8)
            assert np.max(np.abs(analytic - numeric) / scale) < 1e-4

    def test_loglik_path_is_monotone(self):
        design = simulate_design(seed=5, n=800)
        fit = betareg_fit(design)
        path = np.array(fit.loglik_path)
        assert np.all(np.diff(path) >= -1e-9)

    def test_boundary_response_rejected_with_instruction(self):
        y = np.array([0.2, 0.5, 1.0, 0.4, 0.6])
        with pytest.raises(BoundaryResponseError, match="adjust_boundary_responses"):
            CovariateDesign(covariates=np.empty((5, 0)), response=y)

    def test_boundary_adjustment_formula(self):
        y = np.array([0.0, 0.25, 1.0, 0.5])
        adjusted = adjust_boundary_responses(y)
        n = 4
        assert adjusted[0] == pytest.approx(0.5 / n)
        assert adjusted[2] == pytest.approx(((n - 1) + 0.5) / n)
        assert adjusted[1] == 0.25 and adjusted[3] == 0.5

    def test_too_few_observations(self):
        with pytest.raises(DataError):
            betareg_fit(
                CovariateDesign(covariates=np.zeros((3, 1)), response=np.full(3, 0.5))
            )

    def test_raw_dollar_covariates_converge(self):
        # a ~1e5-scale covariate must not break the gradient tolerance;
        # coefficients come back in original units
        rng = np.random.default_rng(21)
        n = 20_000
        income = np.clip(rng.normal(65_000, 25_000, n), 12_000, None)
        eta = 1.43 - 9.9e-7 * income
        mu = 1.0 / (1.0 + np.exp(-eta))
        y = np.clip(rng.beta(mu * 14.6, (1 - mu) * 14.6), 1e-12, 1 - 1e-12)
        fit = betareg_fit(
            CovariateDesign(covariates=income[:, None], response=y)
        )
        assert fit.converged
        assert fit.coefficients[1] == pytest.approx(-9.9e-7, rel=0.25)
        assert 0 < fit.standard_errors[1] < 1e-6

    def test_collinear_race_design_fits_through_pseudo_inverse(self):
        rng = np.random.default_rng(6)
        races = rng.dirichlet([5, 2, 2, 1, 1], size=600)
        eta = 1.39 + races @ np.array([-0.45, -0.27, 0.29, -0.40, -0.51])
        mu = 1.0 / (1.0 + np.exp(-eta))
        y = np.clip(rng.beta(mu * 14.5, (1 - mu) * 14.5), 1e-9, 1 - 1e-9)
        fit = betareg_fit(CovariateDesign(covariates=races, response=y))
        assert fit.converged
        # coefficients are not identified, but fitted means are
        predicted = np.array([predict_mean(fit, row) for row in races[:50]])
        assert np.max(np.abs(predicted - mu[:50])) < 0.05
        assert fit.precision_phi == pytest.approx(14.5, rel=0.2)

    def test_serialization_round_trip(self):
        fit = betareg_fit(simulate_design(seed=7, n=300))
        restored = fit_from_dict(fit_to_dict(fit))
        assert restored.coefficients == pytest.approx(fit.coefficients)
        assert restored.precision_phi == fit.precision_phi

    def test_format_table_mentions_phi_and_stars_legend(self):
        fit = betareg_fit(simulate_design(seed=8, n=2000))
        table = format_fit_table(fit)
        assert "phi" in table
        assert "p<0.01" in table


class TestPredictMean:
    def test_reference_asian_pre_block(self, reference_models):
        coefficients = reference_models["race"]["pre"]["coefficients"]
        assert predict_mean(coefficients, [0, 0, 0, 1, 0]) == pytest.approx(0.729, abs=5e-4)

    def test_reference_natives_pre_block(self, reference_models):
        coefficients = reference_models["race"]["pre"]["coefficients"]
        assert predict_mean(coefficients, [0, 0, 0, 0, 1]) == pytest.approx(0.707, abs=5e-4)

    def test_all_zero_covariates_gives_intercept(self):
        fit = BetaRegFit.from_parameters([0.7, 1.0, -1.0], 5.0)
        from homebound.stats_core import inv_logit

        assert predict_mean(fit, [0.0, 0.0]) == pytest.approx(inv_logit(0.7))

    def test_arity_mismatch(self):
        with pytest.raises(DataError):
            predict_mean([0.5, 1.0], [1.0, 2.0])


@pytest.fixture(scope="module")
def synthetic():
    from homebound.synth import SynthConfig, synthesize_dataset

    return synthesize_dataset(SynthConfig(n_cbgs=25, n_days=28, seed=9))


class TestCovariateDesignFromRecords:
    def test_race_design_shape(self, synthetic):
        mobility, _, demographics = synthetic
        design = covariate_design_from_records(
            mobility,
            demographics,
            dt.date(2020, 1, 6),
            dt.date(2020, 1, 19),
            covariates="race",
        )
        assert design.covariates.shape == (25, 5)
        assert design.covariate_names[0] == "white"
        assert np.all((design.response > 0) & (design.response < 1))

    def test_income_units_flag(self, synthetic):
        mobility, _, demographics = synthetic
        dollars = covariate_design_from_records(
            mobility, demographics, dt.date(2020, 1, 6), dt.date(2020, 1, 19),
            covariates="race+income", income_unit="dollars",
        )
        thousands = covariate_design_from_records(
            mobility, demographics, dt.date(2020, 1, 6), dt.date(2020, 1, 19),
            covariates="race+income", income_unit="thousands",
        )
        assert dollars.covariates[:, 5] == pytest.approx(thousands.covariates[:, 5] * 1000)

    def test_age_design(self, synthetic):
        mobility, _, demographics = synthetic
        design = covariate_design_from_records(
            mobility, demographics, dt.date(2020, 1, 6), dt.date(2020, 1, 12),
            covariates="age",
        )
        assert design.covariates.shape[1] == 1

    def test_empty_window_rejected(self, synthetic):
        mobility, _, demographics = synthetic
        with pytest.raises(DataError):
            covariate_design_from_records(
                mobility, demographics, dt.date(2021, 1, 1), dt.date(2021, 1, 7)
            )
