import math

import numpy as np
import pytest
from scipy.special import eval_genlaguerre, iv

from laguerre_ops.errors import DomainError, PoleError, QuadratureError
from laguerre_ops.specfun import (
    BesselBranchConfig,
    DEFAULT_BESSEL,
    asymptotic_coefficient,
    bessel_i,
    bessel_i_asymptotic,
    bessel_i_series,
    gamma,
    gauss_laguerre_rule,
    laguerre_poly,
    log_bessel_i,
    log_bessel_i_scaled,
)


class TestGamma:
    def test_positive_values(self):
        assert gamma(1.0) == 1.0
        assert gamma(5.0) == 24.0
        assert abs(gamma(0.5) - math.sqrt(math.pi)) < 1e-15

    def test_negative_half(self):
        # Gamma(-1/2) = -2 sqrt(pi)
        assert abs(gamma(-0.5) + 2.0 * math.sqrt(math.pi)) < 1e-14

    def test_poles_raise(self):
        for bad in (0.0, -1.0, -7.0):
            with pytest.raises(PoleError):
                gamma(bad)


class TestBesselI:
    @pytest.mark.parametrize("nu", [-0.25, 0.0, 0.3, 0.5, 1.5, 4.0])
    @pytest.mark.parametrize("z", [1e-6, 0.1, 1.0, 5.0, 14.0])
    def test_series_matches_scipy(self, nu, z):
        assert bessel_i_series(nu, z) == pytest.approx(iv(nu, z), rel=1e-12)

    def test_half_order_closed_form(self):
        # I_{1/2}(z) = sqrt(2/(pi z)) sinh z
        for z in (0.3, 1.0, 7.0):
            ref = math.sqrt(2.0 / (math.pi * z)) * math.sinh(z)
            assert bessel_i(0.5, z) == pytest.approx(ref, rel=1e-12)

    def test_z_zero(self):
        assert bessel_i_series(0.0, 0.0) == 1.0
        assert bessel_i_series(1.5, 0.0) == 0.0

    @pytest.mark.parametrize("nu", [-0.25, 0.0, 0.5, 1.5])
    def test_branch_overlap(self, nu):
        """Series and asymptotic branches agree across the switch window."""
        for z in np.linspace(15.0, 30.0, 7):
            a = math.log(bessel_i_series(nu, z, DEFAULT_BESSEL))
            b = math.log(bessel_i_asymptotic(nu, z, DEFAULT_BESSEL))
            assert abs(a - b) < 1e-9

    def test_first_asymptotic_coefficient(self):
        # paired with powers of (2z): [nu, 1] = (4 nu^2 - 1)/4
        for nu in (0.0, 0.5, 2.0):
            assert asymptotic_coefficient(nu, 1) == pytest.approx(
                (4.0 * nu * nu - 1.0) / 4.0
            )
        assert asymptotic_coefficient(1.0, 0) == 1.0

    @pytest.mark.parametrize("z", [1e-8, 0.5, 10.0, 15.0, 40.0, 200.0])
    def test_log_scaled_consistency(self, z):
        nu = 0.3
        val = log_bessel_i_scaled(nu, z) + z
        assert val == pytest.approx(log_bessel_i(nu, z), rel=1e-12, abs=1e-12)

    def test_large_argument_no_overflow(self):
        # scaled log stays finite far beyond the overflow point of I itself
        val = log_bessel_i_scaled(0.5, 1e6)
        assert math.isfinite(val)

    def test_invalid_order(self):
        with pytest.raises(DomainError):
            bessel_i_series(-1.5, 1.0)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            BesselBranchConfig(series_terms=0)
        with pytest.raises(DomainError):
            BesselBranchConfig(switch_threshold=-1.0)


class TestLaguerrePoly:
    @pytest.mark.parametrize("k", range(7))
    @pytest.mark.parametrize("alpha", [-0.25, 0.5, 2.0])
    def test_matches_scipy(self, k, alpha):
        x = np.array([0.05, 0.7, 3.0, 18.0])
        np.testing.assert_allclose(
            laguerre_poly(k, alpha, x), eval_genlaguerre(k, alpha, x), rtol=1e-12
        )

    def test_low_orders(self):
        x = 2.0
        assert laguerre_poly(0, 0.5, x) == 1.0
        assert laguerre_poly(1, 0.5, x) == pytest.approx(1.5 - x)

    def test_alpha_out_of_range(self):
        with pytest.raises(DomainError):
            laguerre_poly(2, -1.0, 1.0)


class TestGaussLaguerre:
    def test_weights_sum_to_one(self):
        for alpha in (-0.25, 0.5, 3.0):
            rule = gauss_laguerre_rule(alpha, 30)
            assert np.sum(rule.weights) == pytest.approx(1.0, rel=1e-13)

    def test_moments(self):
        # against mu_alpha the first two moments are alpha+1 and (alpha+1)(alpha+2)
        alpha = 0.5
        rule = gauss_laguerre_rule(alpha, 20)
        assert rule.integrate(lambda x: x) == pytest.approx(alpha + 1.0, rel=1e-13)
        assert rule.integrate(lambda x: x * x) == pytest.approx(
            (alpha + 1.0) * (alpha + 2.0), rel=1e-13
        )

    def test_exact_degree(self):
        rule = gauss_laguerre_rule(0.0, 5)
        assert rule.exact_degree == 9
        # degree-9 polynomial integrates exactly: moment E x^9 = 9!
        assert rule.integrate(lambda x: x**9) == pytest.approx(
            math.factorial(9), rel=1e-12
        )

    def test_orthonormality(self):
        alpha = -0.25
        rule = gauss_laguerre_rule(alpha, 40)
        for j in range(1, 5):
            inner = rule.integrate(
                lambda x: laguerre_poly(j, alpha, x) * laguerre_poly(j - 1, alpha, x)
            )
            assert abs(inner) < 1e-12

    def test_bad_node_count(self):
        with pytest.raises((DomainError, QuadratureError)):
            gauss_laguerre_rule(0.5, 0)
