import math

import numpy as np
import pytest
from scipy.integrate import quad

from laguerre_ops.errors import DomainError, OverflowGuardError
from laguerre_ops.expansion import MultiIndexParams, basis_norm_sq
from laguerre_ops.kernels import (
    KernelQuery,
    SubordinationRule,
    heat_apply_kernel,
    heat_kernel,
    l1_kernel_derivative,
    poisson_apply,
    poisson_dt_apply,
    poisson_kernel,
    poisson_kernel_dt,
    stable_density,
    stable_density_dt,
    stable_tail_mass,
)
from laguerre_ops.specfun import laguerre_poly

P_HALF = MultiIndexParams(1, (0.5,))
P_NEG = MultiIndexParams(1, (-0.25,))


def spectral_heat_kernel(alpha, t, x, y, terms=200):
    """Mercer-sum oracle for the heat kernel against d mu_alpha."""
    params = MultiIndexParams(1, (alpha,))
    total = 0.0
    for k in range(terms):
        total += (
            math.exp(-t * k)
            * laguerre_poly(k, alpha, x)
            * laguerre_poly(k, alpha, y)
            / basis_norm_sq((k,), params)
        )
    return total


def spectral_poisson_kernel(alpha, t, x, y, terms=200):
    """Mercer sum for p_t against Lebesgue dy (includes the weight)."""
    params = MultiIndexParams(1, (alpha,))
    w = y**alpha * math.exp(-y) / math.gamma(alpha + 1.0)
    total = 0.0
    for k in range(terms):
        total += (
            math.exp(-t * math.sqrt(k))
            * laguerre_poly(k, alpha, x)
            * laguerre_poly(k, alpha, y)
            / basis_norm_sq((k,), params)
        )
    return total * w


class TestHeatKernel:
    @pytest.mark.parametrize("alpha", [0.5, -0.25])
    def test_matches_spectral_sum(self, alpha):
        for x, y in ((1.0, 2.0), (0.3, 5.0)):
            q = KernelQuery(MultiIndexParams(1, (alpha,)), 0.5, (x,), (y,))
            assert heat_kernel(q) == pytest.approx(
                spectral_heat_kernel(alpha, 0.5, x, y), rel=1e-10
            )

    def test_symmetry(self):
        a = heat_kernel(KernelQuery(P_HALF, 0.7, (1.2,), (3.4,)))
        b = heat_kernel(KernelQuery(P_HALF, 0.7, (3.4,), (1.2,)))
        assert a == pytest.approx(b, rel=1e-12)

    def test_product_over_axes(self):
        p2 = MultiIndexParams(2, (0.5, -0.25))
        q = KernelQuery(p2, 0.5, (1.0, 2.0), (2.0, 0.7))
        f1 = heat_kernel(KernelQuery(P_HALF, 0.5, (1.0,), (2.0,)))
        f2 = heat_kernel(KernelQuery(P_NEG, 0.5, (2.0,), (0.7,)))
        assert heat_kernel(q) == pytest.approx(f1 * f2, rel=1e-12)

    def test_overflow_guard(self):
        with pytest.raises(OverflowGuardError):
            heat_kernel(KernelQuery(P_HALF, 1e-9, (1.0,), (600.0,)))

    def test_query_validation(self):
        with pytest.raises(DomainError):
            KernelQuery(P_HALF, -1.0, (1.0,))
        with pytest.raises(DomainError):
            KernelQuery(P_HALF, 1.0, (0.0,))
        with pytest.raises(DomainError):
            KernelQuery(P_HALF, 1.0, (1.0, 2.0))


class TestHeatApply:
    @pytest.mark.parametrize("t", [1e-3, 0.3, 2.0, 40.0])
    @pytest.mark.parametrize("alpha", [0.5, -0.25])
    def test_conserves_mass(self, t, alpha):
        params = MultiIndexParams(1, (alpha,))
        for x in (0.05, 1.0, 20.0):
            v = heat_apply_kernel(
                lambda y: np.ones_like(y), KernelQuery(params, t, (x,))
            )
            assert v == pytest.approx(1.0, abs=1e-11)

    @pytest.mark.parametrize("k", range(7))
    def test_eigenfunctions(self, k):
        t, x = 0.4, 1.7
        got = heat_apply_kernel(
            lambda y: laguerre_poly(k, 0.5, y), KernelQuery(P_HALF, t, (x,))
        )
        want = math.exp(-t * k) * laguerre_poly(k, 0.5, x)
        assert got == pytest.approx(want, abs=1e-11)

    def test_semigroup_property(self):
        f = lambda y: np.exp(-0.3 * y)
        inner = lambda ys: np.array(
            [heat_apply_kernel(f, KernelQuery(P_HALF, 0.4, (float(y),))) for y in ys]
        )
        lhs = heat_apply_kernel(inner, KernelQuery(P_HALF, 0.3, (1.2,)), order=8)
        rhs = heat_apply_kernel(f, KernelQuery(P_HALF, 0.7, (1.2,)))
        assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_two_dimensional(self):
        p2 = MultiIndexParams(2, (0.5, -0.25))
        g = lambda pts: laguerre_poly(1, 0.5, pts[:, 0]) * laguerre_poly(
            2, -0.25, pts[:, 1]
        )
        got = heat_apply_kernel(g, KernelQuery(p2, 0.5, (1.2, 0.7)))
        want = (
            math.exp(-0.5 * 3)
            * laguerre_poly(1, 0.5, 1.2)
            * laguerre_poly(2, -0.25, 0.7)
        )
        assert got == pytest.approx(want, abs=1e-11)


class TestStableDensity:
    def test_laplace_transform(self):
        # int_0^inf e^{-ns} g(t,s) ds = e^{-t sqrt(n)}
        for t in (0.1, 1.0, 5.0):
            for n in (0, 1, 4, 9):
                val, _ = quad(
                    lambda s: stable_density(t, s) * math.exp(-n * s),
                    0.0,
                    np.inf,
                    limit=200,
                )
                assert val == pytest.approx(math.exp(-t * math.sqrt(n)), abs=1e-10)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_derivative_laplace_transform(self, m):
        # differentiating under the integral: int e^{-ns} d^m g/dt^m ds
        # equals the m-th t-derivative of e^{-t sqrt(n)}
        t, n = 0.8, 4
        rn = math.sqrt(n)
        val, _ = quad(
            lambda s: stable_density_dt(m, t, s) * math.exp(-n * s),
            0.0,
            np.inf,
            limit=200,
        )
        assert val == pytest.approx((-rn) ** m * math.exp(-t * rn), abs=1e-10)

    def test_total_mass(self):
        for t in (0.3, 2.0):
            val, _ = quad(lambda s: stable_density(t, s), 0.0, np.inf, limit=200)
            assert val == pytest.approx(1.0, abs=1e-10)

    def test_tail_mass_closed_form(self):
        # int_U^inf g(t,s) ds = erf(t / (2 sqrt(U)))
        t, u = 1.3, 4.0
        val, _ = quad(lambda s: stable_density(t, s), u, np.inf, limit=200)
        assert val == pytest.approx(stable_tail_mass(0, t, u), abs=1e-12)

    def test_tail_mass_derivative(self):
        t, u, h = 0.9, 4.0, 1e-6
        fd = (stable_tail_mass(0, t + h, u) - stable_tail_mass(0, t - h, u)) / (2 * h)
        assert fd == pytest.approx(stable_tail_mass(1, t, u), abs=1e-9)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            stable_density(-1.0, 1.0)
        with pytest.raises(DomainError):
            stable_density(1.0, 0.0)


class TestPoissonKernel:
    def test_matches_spectral_sum(self):
        # t large enough that the Mercer sum converges quickly
        t, x, y = 1.5, 1.0, 2.0
        got = poisson_kernel(KernelQuery(P_HALF, t, (x,), (y,)))
        assert got == pytest.approx(
            spectral_poisson_kernel(0.5, t, x, y), rel=1e-9
        )

    @pytest.mark.parametrize("t", [0.25, 1.0])
    def test_unit_mass(self, t):
        x = 1.3
        val, _ = quad(
            lambda y: poisson_kernel(KernelQuery(P_HALF, t, (x,), (y,))),
            0.0,
            80.0,
            points=[x],
            limit=300,
        )
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_nonnegative(self):
        for y in np.geomspace(0.01, 40.0, 12):
            assert poisson_kernel(KernelQuery(P_HALF, 0.5, (1.0,), (y,))) >= 0.0

    def test_dt_requires_order(self):
        q = KernelQuery(P_HALF, 1.0, (1.0,), (2.0,), derivative_order=0)
        with pytest.raises(DomainError):
            poisson_kernel_dt(q)

    def test_dt_integrates_to_zero(self):
        # mass conservation: d/dt of the unit mass vanishes
        q = lambda y: poisson_kernel_dt(
            KernelQuery(P_HALF, 1.0, (1.0,), (y,), derivative_order=1)
        )
        val, _ = quad(q, 0.0, 80.0, points=[1.0], limit=300)
        assert abs(val) < 1e-8


class TestPoissonApply:
    @pytest.mark.parametrize("k", [0, 1, 3])
    def test_eigenfunctions(self, k):
        t, x = 0.8, 1.3
        got = poisson_apply(lambda y: laguerre_poly(k, 0.5, y), P_HALF, t, (x,))
        want = math.exp(-t * math.sqrt(k)) * laguerre_poly(k, 0.5, x)
        assert got == pytest.approx(want, abs=1e-10)

    def test_dt_apply_matches_multiplier(self):
        k, m, t, x = 3, 2, 0.7, 1.3
        got = poisson_dt_apply(lambda y: laguerre_poly(k, 0.5, y), P_HALF, t, (x,), m)
        want = (
            (-math.sqrt(k)) ** m
            * math.exp(-t * math.sqrt(k))
            * laguerre_poly(k, 0.5, x)
        )
        assert got == pytest.approx(want, abs=1e-8)


class TestL1Derivative:
    def test_finite_and_scales(self):
        a = l1_kernel_derivative(P_HALF, 0.5, (1.0,), 1)
        b = l1_kernel_derivative(P_HALF, 1.0, (1.0,), 1)
        assert math.isfinite(a) and math.isfinite(b)
        assert a > b > 0.0


class TestSubordinationRule:
    def test_validation(self):
        with pytest.raises(DomainError):
            SubordinationRule(abs_tol=0.0)
        assert SubordinationRule().mapping == "neg-log-r"
