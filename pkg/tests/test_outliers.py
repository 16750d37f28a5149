import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from typicality import GaussianModel
from typicality.errors import DomainError, SingularCovarianceError
from typicality.gaussian import LOG2E, log2_density_multivariate
from typicality.outliers import (Category, OutlierVerdict, TypicalityBand, annulus_bounds,
                                 classify_mahalanobis, classify_typicality, compare_methods,
                                 mahalanobis_distance, mean_is_atypical, typicality_band)

from conftest import random_spd


class TestMahalanobis:
    def test_values(self):
        assert mahalanobis_distance([3, 4], [0, 0], np.eye(2)) == pytest.approx(5.0)
        assert mahalanobis_distance([1.2, -3], [1.2, -3], np.eye(2)) == 0.0
        assert mahalanobis_distance([2, 0], [0, 0], [[4, 0], [0, 1]]) == pytest.approx(1.0)

    def test_matches_explicit_inverse(self, rng):
        S = random_spd(rng, 4)
        x, mu = rng.standard_normal(4), rng.standard_normal(4)
        oracle = math.sqrt((x - mu) @ np.linalg.inv(S) @ (x - mu))
        assert mahalanobis_distance(x, mu, S) == pytest.approx(oracle, rel=1e-10)

    def test_one_d_is_abs_z(self):
        assert mahalanobis_distance([7.0], [1.0], [[4.0]]) == pytest.approx(3.0)

    def test_singular_raises(self):
        with pytest.raises(SingularCovarianceError):
            mahalanobis_distance([1, 1], [0, 0], [[1, 1], [1, 1]])


class TestClassifyMahalanobis:
    def test_all_at_mean(self):
        m = GaussianModel.standard(3)
        for c in (1e-6, 1.0, 3.0):
            assert not any(v.is_mahalanobis_outlier for v in classify_mahalanobis(np.zeros((5, 3)), m, c))

    def test_one_d(self):
        v = classify_mahalanobis([[3.1], [3.0], [-2.0]], GaussianModel.standard(1), 3)
        assert [x.is_mahalanobis_outlier for x in v] == [True, False, False]

    def test_bad_c(self):
        with pytest.raises(DomainError):
            classify_mahalanobis([[0.0]], GaussianModel.standard(1), 0)

    def test_monotone_in_c(self, rng):
        X = rng.standard_normal((500, 4)) * 1.5
        m = GaussianModel.standard(4)
        prev = None
        for c in (0.5, 1, 2, 3, 4):
            flagged = {v.index for v in classify_mahalanobis(X, m, c) if v.is_mahalanobis_outlier}
            if prev is not None:
                assert flagged <= prev
            prev = flagged


class TestBand:
    def test_bounds(self):
        band = typicality_band(GaussianModel.standard(4), 2.5)
        assert band.upper_log2_density - band.lower_log2_density == pytest.approx(5.0)
        assert band.lower_log2_density == -(band.entropy_bits + 2.5)

    def test_zero_width(self):
        m = GaussianModel.standard(2)
        band = typicality_band(m, 0.0)
        assert band.contains(-m.entropy_bits)
        assert not band.contains(-m.entropy_bits + 1e-9)

    def test_negative_epsilon(self):
        with pytest.raises(DomainError):
            typicality_band(GaussianModel.standard(2), -1)

    def test_mean_typical_iff_gap_within_epsilon(self):
        m = GaussianModel.standard(20)
        gap = 10 * LOG2E
        assert gap == pytest.approx(14.427, abs=1e-3)
        assert not typicality_band(m, gap - 1e-6).contains(log2_density_multivariate(np.zeros(20), m))
        assert typicality_band(m, gap + 1e-6).contains(log2_density_multivariate(np.zeros(20), m))


class TestClassifyTypicality:
    def test_mean_flagged(self):
        v = classify_typicality(np.zeros((1, 20)), GaussianModel.standard(20), 5)
        assert v[0].is_typicality_outlier
        assert v[0].log2_density > typicality_band(GaussianModel.standard(20), 5).upper_log2_density

    def test_entropy_shell_is_typical(self):
        D = 7
        m = GaussianModel.standard(D)
        x = np.zeros(D)
        x[0] = math.sqrt(D)  # -log2 p = H exactly on the radius sqrt(D) shell
        assert log2_density_multivariate(x, m) == pytest.approx(-m.entropy_bits, abs=1e-12)
        for eps in (1e-9, 0.5, 5.0):
            assert not classify_typicality(x[None], m, eps)[0].is_typicality_outlier

    def test_far_point(self):
        m = GaussianModel.standard(2)
        v = classify_typicality([[10.0, 0.0]], m, 5)[0]
        assert v.is_typicality_outlier
        assert v.log2_density < typicality_band(m, 5).lower_log2_density

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 30), st.floats(0, 20), st.floats(0, 20), st.integers(0, 2**16))
    def test_monotone_in_epsilon(self, D, e1, e2, seed):
        e1, e2 = sorted((e1, e2))
        X = np.random.default_rng(seed).standard_normal((200, D)) * 1.3
        m = GaussianModel.standard(D)
        t1 = {v.index for v in classify_typicality(X, m, e1) if not v.is_typicality_outlier}
        t2 = {v.index for v in classify_typicality(X, m, e2) if not v.is_typicality_outlier}
        assert t1 <= t2


class TestAnnulus:
    def test_zero_epsilon(self):
        assert annulus_bounds(40, 1.0, 0.0) == pytest.approx((math.sqrt(40), math.sqrt(40)))

    def test_numerical_inversion(self):
        D, sigma, eps = 40, 1.0, 5.0
        m = GaussianModel.from_moments(np.zeros(D), sigma**2 * np.eye(D))

        def neg_log2_at_radius(r):
            x = np.zeros(D)
            x[0] = r
            return -log2_density_multivariate(x, m)

        r_lo = optimize.brentq(lambda r: neg_log2_at_radius(r) - (m.entropy_bits - eps), 0, math.sqrt(D))
        r_hi = optimize.brentq(lambda r: neg_log2_at_radius(r) - (m.entropy_bits + eps), math.sqrt(D), 50)
        lo, hi = annulus_bounds(D, sigma, eps)
        assert lo == pytest.approx(r_lo, abs=1e-9)
        assert hi == pytest.approx(r_hi, abs=1e-9)

    @pytest.mark.parametrize("D,sigma,eps", [(40, 1.0, 5.0), (10, 2.5, 1.0), (3, 0.3, 0.7)])
    def test_identity(self, D, sigma, eps):
        lo, hi = annulus_bounds(D, sigma, eps)
        assert lo > 0
        assert hi**2 - lo**2 == pytest.approx(4 * eps * math.log(2) * sigma**2)

    def test_clamps(self):
        assert annulus_bounds(2, 1.0, 5.0)[0] == 0.0

    def test_agrees_with_classification(self, rng):
        for D in (2, 5, 20):
            m = GaussianModel.standard(D)
            X = rng.standard_normal((1000, D)) * rng.uniform(0.2, 1.8, size=(1000, 1))
            lo, hi = annulus_bounds(D, 1.0, 3.0)
            r = np.linalg.norm(X, axis=1)
            by_radius = (r < lo) | (r > hi)
            by_density = np.array([v.is_typicality_outlier for v in classify_typicality(X, m, 3.0)])
            np.testing.assert_array_equal(by_radius, by_density)


class TestCompare:
    def test_category_function(self):
        assert Category.from_flags(False, False) is Category.INLIER
        assert Category.from_flags(True, True) is Category.BOTH
        assert Category.from_flags(True, False) is Category.MAHALANOBIS_ONLY
        assert Category.from_flags(False, True) is Category.TYPICALITY_ONLY
        v = OutlierVerdict(0, 1.0, -3.0, True, False)
        assert v.to_dict()["category"] == "MahalanobisOnly"

    def test_all_inliers_with_loose_thresholds(self, rng):
        X = rng.standard_normal((100, 3))
        verdicts, counts = compare_methods(X, GaussianModel.standard(3), c=100, epsilon=1000)
        assert counts == {"Inlier": 100, "Both": 0, "MahalanobisOnly": 0, "TypicalityOnly": 0}
        assert len(verdicts) == 100

    def test_two_d_mahalanobis_subset_of_typicality(self, rng):
        # in 2-D with c=3, eps=5 the typicality radius (~2.99 SD) is inside c
        S = random_spd(rng, 2)
        m = GaussianModel.from_moments([0.3, -0.2], S)
        X = rng.standard_normal((2000, 2)) * 2
        _, counts = compare_methods(X, m, 3.0, 5.0)
        assert counts["MahalanobisOnly"] == 0

    def test_mean_exclusion_rule(self):
        for D in range(1, 60):
            for eps in np.linspace(0, 50, 26):
                m = GaussianModel.standard(D)
                flagged = classify_typicality(np.zeros((1, D)), m, eps)[0].is_typicality_outlier
                assert flagged == mean_is_atypical(D, eps)

    def test_band_type(self):
        band = TypicalityBand(10.0, 1.0)
        assert band.lower_log2_density <= band.upper_log2_density
