import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from typicality import (DataMatrix, DomainError, Estimator, GaussianModel, IllPosedError,
                        SingularCovarianceError, empirical_entropy_estimate, entropy_multivariate,
                        entropy_univariate, fit_gaussian, log2_density_multivariate,
                        log2_density_univariate, sample_moments)
from typicality.gaussian import LOG2E, cholesky_lower, log2_density

from conftest import random_spd

# Frozen from 30-digit mpmath evaluations of the normal density / entropy.
LOG2_PDF_AT_MODE = -1.32574806473615939902
LOG2_PDF_AT_ONE = -2.04709558518064110270
LOG2_PDF_3_4 = -20.6851841405843613900
ENTROPY_QUARTER = 1.04709558518064110270


class TestUnivariate:
    def test_mode(self):
        assert log2_density_univariate(0, 0, 1) == pytest.approx(LOG2_PDF_AT_MODE, abs=1e-14)

    def test_one_sd(self):
        assert log2_density_univariate(1, 0, 1) == pytest.approx(LOG2_PDF_AT_ONE, abs=1e-14)

    @pytest.mark.parametrize("mu,var", [(-3.0, 0.5), (0.0, 2.0), (7.5, 10.0)])
    def test_mode_is_location_free(self, mu, var):
        assert log2_density_univariate(mu, mu, var) == pytest.approx(-0.5 * math.log2(2 * math.pi * var))

    def test_exponentiates_to_scipy_pdf(self):
        assert 2 ** log2_density_univariate(1.3, 0.2, 2.5) == pytest.approx(
            stats.norm(0.2, math.sqrt(2.5)).pdf(1.3), rel=1e-12)

    @pytest.mark.parametrize("var", [0.0, -1.0])
    def test_bad_variance(self, var):
        with pytest.raises(DomainError):
            log2_density_univariate(0, 0, var)
        with pytest.raises(DomainError):
            entropy_univariate(var)

    def test_entropy_values(self):
        assert entropy_univariate(1) == pytest.approx(2.0471, abs=1e-4)
        assert entropy_univariate(4) == pytest.approx(entropy_univariate(1) + 1, abs=1e-14)
        assert entropy_univariate(0.25) == pytest.approx(ENTROPY_QUARTER, abs=1e-14)

    def test_entropy_matches_quadrature(self):
        # -int f log2 f, independent of the closed form
        var = 3.7
        f = stats.norm(0, math.sqrt(var)).pdf
        h, _ = integrate.quad(lambda x: -f(x) * math.log2(f(x)) if f(x) > 0 else 0.0, -60, 60)
        assert entropy_univariate(var) == pytest.approx(h, abs=1e-8)


class TestMultivariate:
    def test_mean_identity(self):
        for D in (1, 2, 7):
            m = GaussianModel.standard(D)
            assert log2_density_multivariate(np.zeros(D), m) == pytest.approx(-0.5 * D * math.log2(2 * math.pi))

    def test_hand_expanded_2d(self):
        m = GaussianModel.standard(2)
        assert log2_density_multivariate([3, 4], m) == pytest.approx(LOG2_PDF_3_4, abs=1e-12)

    def test_reduces_to_univariate(self):
        m = GaussianModel.from_moments([0.4], [[2.3]])
        for x in (-2.0, 0.4, 1.7):
            assert log2_density_multivariate([x], m) == pytest.approx(
                log2_density_univariate(x, 0.4, 2.3), abs=1e-12)
        assert m.entropy_bits == pytest.approx(entropy_univariate(2.3), abs=1e-12)

    def test_matches_scipy_logpdf(self, rng):
        S = random_spd(rng, 5)
        mu = rng.standard_normal(5)
        m = GaussianModel.from_moments(mu, S)
        X = rng.standard_normal((20, 5))
        expected = stats.multivariate_normal(mu, S).logpdf(X) * LOG2E
        np.testing.assert_allclose(log2_density(X, m), expected, rtol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            log2_density_multivariate([1.0, 2.0, 3.0], GaussianModel.standard(2))

    def test_entropy_identity(self):
        for D in (1, 5, 50):
            assert entropy_multivariate(np.eye(D)) == pytest.approx(D * entropy_univariate(1), abs=1e-10)

    def test_entropy_diagonal(self):
        v = [0.3, 1.0, 4.5, 9.0]
        assert entropy_multivariate(np.diag(v)) == pytest.approx(sum(entropy_univariate(x) for x in v))

    def test_entropy_correlated(self):
        oracle = 2 * entropy_univariate(1) + 0.5 * math.log2(1 - 0.25)
        assert entropy_multivariate([[1, 0.5], [0.5, 1]]) == pytest.approx(oracle, abs=1e-12)
        assert oracle == pytest.approx(3.8866, abs=1e-4)

    def test_entropy_matches_scipy(self, rng):
        S = random_spd(rng, 6)
        assert entropy_multivariate(S) == pytest.approx(
            stats.multivariate_normal(np.zeros(6), S).entropy() * LOG2E, rel=1e-12)

    def test_singular_reports_pivot(self):
        S = np.diag([1.0, 2.0, 0.0, 3.0])
        with pytest.raises(SingularCovarianceError) as info:
            entropy_multivariate(S)
        assert info.value.pivot == 3

    def test_mode_gap(self, rng):
        for D in (2, 10, 33):
            m = GaussianModel.from_moments(rng.standard_normal(D), random_spd(rng, D))
            gap = -log2_density_multivariate(m.mean, m)
            assert gap == pytest.approx(m.entropy_bits - 0.5 * D * LOG2E, abs=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 12), st.floats(0.01, 100.0), st.integers(0, 2**16))
    def test_scaling_law(self, D, c, seed):
        S = random_spd(np.random.default_rng(seed), D)
        diff = entropy_multivariate(c * S) - entropy_multivariate(S)
        assert diff == pytest.approx(0.5 * D * math.log2(c), abs=1e-9)


class TestModel:
    def test_factor_reconstructs(self, rng):
        S = random_spd(rng, 8)
        m = GaussianModel.from_moments(np.zeros(8), S)
        np.testing.assert_allclose(m.chol_factor @ m.chol_factor.T, S, rtol=1e-8)
        assert np.all(np.diag(m.chol_factor) > 0)
        np.testing.assert_array_equal(m.covariance, m.covariance.T)

    def test_immutable(self):
        m = GaussianModel.standard(3)
        with pytest.raises(ValueError):
            m.mean[0] = 1.0
        with pytest.raises(AttributeError):
            m.entropy_bits = 0.0

    def test_cholesky_rejects_asymmetric(self):
        with pytest.raises(DomainError):
            cholesky_lower([[1.0, 0.2], [0.0, 1.0]])


class TestFit:
    def test_two_point_mean(self):
        mean, _ = sample_moments([[0.0, 0.0], [2.0, 2.0]])
        np.testing.assert_allclose(mean, [1.0, 1.0])
        with pytest.raises(IllPosedError):
            fit_gaussian([[0.0, 0.0], [2.0, 2.0]], "sample")

    def test_rank_deficient_is_ridged_and_flagged(self):
        m = fit_gaussian([[0.0, 0.0], [2.0, 2.0], [1.0, 1.0]], "sample")
        np.testing.assert_allclose(m.mean, [1.0, 1.0])
        assert m.estimator is Estimator.SAMPLE
        assert m.regularized
        assert m.provenance["regularization"] == pytest.approx(1e-10 * 2.0 / 2)

    def test_ill_posed(self, rng):
        with pytest.raises(IllPosedError):
            fit_gaussian(rng.standard_normal((5, 5)), "sample")

    def test_entropy_near_truth(self):
        X = np.random.default_rng(11).standard_normal((1400, 20))
        m = fit_gaussian(DataMatrix(X), "sample")
        assert abs(m.entropy_bits - entropy_multivariate(np.eye(20))) < 0.5

    def test_deterministic(self, rng):
        X = rng.standard_normal((200, 3))
        a = fit_gaussian(X, "mcd", seed=5, n_starts=50)
        b = fit_gaussian(X, "mcd", seed=5, n_starts=50)
        np.testing.assert_array_equal(a.mean, b.mean)
        np.testing.assert_array_equal(a.covariance, b.covariance)
        assert a.entropy_bits == b.entropy_bits

    @pytest.mark.parametrize("estimator", ["sample", "mcd"])
    def test_location_invariance(self, rng, estimator):
        X = rng.standard_normal((150, 4)) @ random_spd(rng, 4)
        shift = np.array([100.0, -3.0, 0.5, 7.0])
        a = fit_gaussian(X, estimator, seed=1, n_starts=40)
        b = fit_gaussian(X + shift, estimator, seed=1, n_starts=40)
        assert abs(a.entropy_bits - b.entropy_bits) < 1e-10

    def test_missing_refused(self):
        d = DataMatrix([[1.0, 2.0], [np.nan, 1.0], [3.0, 0.0]], missing_mask=[[0, 0], [1, 0], [0, 0]])
        with pytest.raises(DomainError):
            fit_gaussian(d)


class TestEmpiricalEntropy:
    def test_single_point_at_mode(self):
        D = 6
        assert empirical_entropy_estimate(np.zeros((1, D)), GaussianModel.standard(D)) == pytest.approx(
            0.5 * D * math.log2(2 * math.pi))

    def test_aep_convergence(self):
        model = GaussianModel.standard(10)
        for seed in range(5):
            X = np.random.default_rng(seed).standard_normal((10_000, 10))
            assert abs(empirical_entropy_estimate(X, model) - model.entropy_bits) < 0.1

    def test_shift_invariance(self, rng):
        S = random_spd(rng, 3)
        X = rng.standard_normal((50, 3))
        a = np.array([5.0, -2.0, 1.0])
        m0 = GaussianModel.from_moments(np.zeros(3), S)
        m1 = GaussianModel.from_moments(a, S)
        assert empirical_entropy_estimate(X + a, m1) == pytest.approx(empirical_entropy_estimate(X, m0), abs=1e-10)

    def test_empty(self):
        with pytest.raises(DomainError):
            empirical_entropy_estimate(np.zeros((0, 3)), GaussianModel.standard(3))
