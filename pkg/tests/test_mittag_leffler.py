"""Unit tests for the two-parameter ML evaluator.

Oracle values were computed independently with mpmath at 50 digits and are
frozen here; closed forms (exp, erfc, sinh) come from scipy.
"""

import math

import numpy as np
import pytest
from scipy.special import erfc

from fracorder.errors import RangeError
from fracorder.mittag_leffler import (
    MLQuery,
    ml,
    ml_asymptotic_neg,
    ml_asymptotic_pos,
    ml_log_array,
    ml_point,
    ml_series,
    ml_value_array,
    series_radius,
)


class TestQueryValidation:
    def test_rho_out_of_range(self):
        with pytest.raises(RangeError):
            MLQuery(rho=0.05, mu=1.0, z=0.0)
        with pytest.raises(RangeError):
            MLQuery(rho=2.5, mu=1.0, z=0.0)

    def test_mu_out_of_range(self):
        with pytest.raises(RangeError):
            MLQuery(rho=0.5, mu=-1.0, z=0.0)
        with pytest.raises(RangeError):
            MLQuery(rho=0.5, mu=4.0, z=0.0)

    def test_nonfinite_z(self):
        with pytest.raises(RangeError):
            MLQuery(rho=0.5, mu=0.5, z=float("inf"))


class TestSeries:
    def test_exp_identity(self):
        v = ml_series(MLQuery(1.0, 1.0, 1.0))
        assert v.value == pytest.approx(math.e, rel=1e-14)

    def test_single_term(self):
        # z = 0 leaves only 1/Gamma(mu)
        v = ml_series(MLQuery(0.5, 0.5, 0.0))
        assert v.value == pytest.approx(0.5641895835477563, rel=1e-14)

    def test_alternating_point(self):
        # 1/sqrt(pi) + z e^{z^2} erfc(-z) at z = -1; mpmath cross-check
        v = ml_series(MLQuery(0.5, 0.5, -1.0))
        assert v.value == pytest.approx(0.13660600739194928, rel=1e-10)

    def test_est_error_bound_respected(self):
        v = ml_series(MLQuery(0.5, 0.5, -8.0))
        assert 0.0 <= v.est_rel_error <= 1e-10

    def test_value_sign_log_consistency(self):
        for z in (-3.0, -0.5, 0.7, 4.0):
            v = ml_series(MLQuery(0.7, 1.0, z))
            assert v.value == pytest.approx(v.sign * math.exp(v.log_abs), rel=1e-12)


class TestAsymptoticPositive:
    def test_exp_identity_large(self):
        v = ml_asymptotic_pos(MLQuery(1.0, 1.0, 30.0))
        assert v.value == pytest.approx(math.exp(30.0), rel=1e-10)

    def test_log_prefactor(self):
        # leading order: z^{1/rho} + ((1-mu)/rho) ln z - ln rho
        v = ml_asymptotic_pos(MLQuery(0.5, 0.5, 40.0))
        lead = 1600.0 + 1.0 * math.log(40.0) - math.log(0.5)
        assert v.log_abs == pytest.approx(lead, abs=0.01)

    def test_huge_argument_no_overflow(self):
        v = ml_asymptotic_pos(MLQuery(0.5, 0.5, 5000.0))
        assert v.log_abs > 2.0e7 and math.isinf(v.value)

    def test_below_switch_rejected(self):
        with pytest.raises(RangeError):
            ml_asymptotic_pos(MLQuery(0.5, 0.5, 2.0))


class TestAsymptoticNegative:
    def test_leading_law(self):
        # E_{rho,rho}(-z) ~ z^{-2}/|Gamma(-rho)|
        v = ml_asymptotic_neg(MLQuery(0.5, 0.5, -100.0))
        lead = 1e-4 / abs(math.gamma(-0.5))
        assert v.value == pytest.approx(lead, rel=0.02)

    def test_pole_kills_first_term(self):
        # mu = rho makes the k=1 coefficient 1/Gamma(0) = 0, so the value is
        # O(z^-2), not O(z^-1)
        v = ml_asymptotic_neg(MLQuery(0.5, 0.5, -200.0))
        assert abs(v.value) < 1.0 / 200.0

    def test_below_switch_rejected(self):
        with pytest.raises(RangeError):
            ml_asymptotic_neg(MLQuery(0.5, 0.5, -2.0))


class TestDispatcher:
    def test_exp_small_negative(self):
        assert ml_point(1.0, 1.0, -5.0).value == pytest.approx(math.exp(-5.0), rel=1e-12)

    def test_sinh_identity(self):
        # E_{2,2}(z) = sinh(sqrt z)/sqrt z
        assert ml_point(2.0, 2.0, 1.0).value == pytest.approx(math.sinh(1.0), rel=1e-12)

    def test_erfc_identity(self):
        # E_{1/2,1}(z) = e^{z^2} erfc(-z); spec-sheet point z = -4 corrected
        # against mpmath: 0.13699945762506139
        v = ml_point(0.5, 1.0, -4.0)
        assert v.value == pytest.approx(0.13699945762506139, rel=1e-10)
        assert v.value == pytest.approx(math.exp(16.0) * erfc(4.0), rel=1e-8)

    def test_recurrence(self):
        # E_{rho,mu}(z) = 1/Gamma(mu) + z E_{rho,mu+rho}(z)
        for rho, mu, z in [(0.5, 1.0, -3.0), (0.7, 0.7, 2.0), (0.3, 1.0, 0.9)]:
            lhs = ml_point(rho, mu, z).value
            rhs = 1.0 / math.gamma(mu) + z * ml_point(rho, mu + rho, z).value
            assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_positivity_monotone(self):
        z = np.linspace(0.0, 30.0, 200)
        vals = ml_value_array(0.6, 0.6, z)
        assert np.all(vals > 0.0)
        assert np.all(np.diff(vals) >= 0.0)


class TestOverlap:
    @pytest.mark.parametrize("rho", [0.3, 0.5, 0.8])
    @pytest.mark.parametrize("mu_is_rho", [True, False])
    def test_band_agreement(self, rho, mu_is_rho):
        mu = rho if mu_is_rho else 1.0
        r = series_radius(rho)
        for dz in np.linspace(-1.0, 1.0, 7):
            for sgn in (1.0, -1.0):
                z = sgn * (r + dz)
                s = ml_series(MLQuery(rho, mu, z))
                a = (ml_asymptotic_pos if z > 0 else ml_asymptotic_neg)(
                    MLQuery(rho, mu, z)
                )
                assert a.value == pytest.approx(s.value, rel=1e-6)


class TestLogArray:
    def test_matches_scalar_across_regimes(self):
        z = np.array([-300.0, -15.0, -2.0, 0.0, 3.0, 14.0, 200.0])
        sg, la = ml_log_array(0.5, 1.0, z)
        for i, zi in enumerate(z):
            v = ml_point(0.5, 1.0, float(zi))
            assert sg[i] == v.sign
            assert la[i] == pytest.approx(v.log_abs, rel=1e-10, abs=1e-10)

    def test_shape_preserved(self):
        z = np.linspace(-5, 5, 12).reshape(3, 4)
        sg, la = ml_log_array(0.5, 0.5, z)
        assert sg.shape == la.shape == (3, 4)
