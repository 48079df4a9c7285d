"""Quadrature-oracle tests: closed-form fractional integrals/derivatives of
power functions, operator identities, and the eigenfunction relations that
link the quadrature to the ML evaluator."""

import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from fracorder.errors import OutOfRange, SingularityTooStrong
from fracorder.fractional_calculus import (
    SampledFunction,
    caputo_derivative,
    frac_integral,
    frac_integral_grid,
    graded_grid,
    rl_derivative,
    verify_equation,
)
from fracorder.mittag_leffler import ml_point, ml_value_array


def _sampled(times, fn):
    return SampledFunction(times, fn(times))


class TestSampledFunction:
    def test_rejects_bad_grid(self):
        with pytest.raises(ValueError):
            SampledFunction(np.array([0.1, 0.2, 0.3]), np.zeros(3))
        with pytest.raises(ValueError):
            SampledFunction(np.array([0.0, 0.2, 0.1]), np.zeros(3))
        with pytest.raises(ValueError):
            SampledFunction(np.array([0.0, 0.1, 0.2]), np.array([0.0, np.nan, 1.0]))


class TestFracIntegral:
    def test_constant(self):
        f = _sampled(np.linspace(0, 1, 200), lambda t: np.ones_like(t))
        assert frac_integral(f, 0.5, 1.0) == pytest.approx(1.0 / gamma_fn(1.5), rel=1e-6)

    def test_linear(self):
        f = _sampled(np.linspace(0, 1, 200), lambda t: t)
        assert frac_integral(f, 0.5, 1.0) == pytest.approx(
            gamma_fn(2.0) / gamma_fn(2.5), rel=1e-8
        )

    def test_power_beta_grid(self):
        # J^beta t^p = Gamma(p+1)/Gamma(p+1+beta) t^{p+beta}
        beta, p = 0.3, 2.0
        f = _sampled(np.linspace(0, 2, 400), lambda t: t**p)
        want = gamma_fn(p + 1) / gamma_fn(p + 1 + beta) * 1.5 ** (p + beta)
        assert frac_integral(f, beta, 1.5) == pytest.approx(want, rel=1e-5)

    def test_semigroup(self):
        # J^a J^b f = J^{a+b} f for f = t on a graded grid
        times = graded_grid(1.0, 800, 0.5)
        f = _sampled(times, lambda t: t)
        inner = frac_integral_grid(f, 0.3)
        outer = frac_integral(SampledFunction(times, inner), 0.4, 1.0)
        want = gamma_fn(2.0) / gamma_fn(2.7)
        assert outer == pytest.approx(want, rel=1e-4)

    def test_out_of_range(self):
        f = _sampled(np.linspace(0, 1, 50), lambda t: t)
        with pytest.raises(OutOfRange):
            frac_integral(f, 0.5, 2.0)
        with pytest.raises(OutOfRange):
            frac_integral(f, 1.5, 0.5)

    def test_singular_leading_exponent(self):
        # J^{1-rho}[t^{rho-1}/Gamma(rho)] = 1 exactly
        rho = 0.6
        times = graded_grid(1.0, 600, rho)
        with np.errstate(divide="ignore"):
            vals = times ** (rho - 1.0) / gamma_fn(rho)
        vals[0] = 0.0
        f = SampledFunction(times, vals)
        out = frac_integral(f, 1.0 - rho, 0.8, leading_exponent=rho - 1.0)
        assert out == pytest.approx(1.0, rel=1e-4)

    def test_too_strong_singularity(self):
        f = _sampled(np.linspace(0, 1, 50), lambda t: t)
        with pytest.raises(SingularityTooStrong):
            frac_integral(f, 0.5, 0.5, leading_exponent=-1.2)


class TestDerivatives:
    def test_rl_of_power(self):
        # d^rho/dt^rho t = t^{1-rho}/Gamma(2-rho)
        rho = 0.4
        times = graded_grid(1.0, 1000, rho)
        f = _sampled(times, lambda t: t)
        i = 700
        want = times[i] ** (1.0 - rho) / gamma_fn(2.0 - rho)
        assert rl_derivative(f, rho, float(times[i])) == pytest.approx(want, rel=1e-4)

    def test_caputo_of_power(self):
        rho = 0.4
        times = graded_grid(1.0, 1000, rho)
        f = _sampled(times, lambda t: t)
        want = times[700] ** (1.0 - rho) / gamma_fn(2.0 - rho)
        assert caputo_derivative(f, rho, float(times[700])) == pytest.approx(want, rel=1e-4)

    def test_caputo_kills_constants(self):
        times = np.linspace(0, 1, 300)
        f = SampledFunction(times, np.full(300, 7.0))
        assert abs(caputo_derivative(f, 0.5, 0.9)) < 1e-12

    def test_rl_caputo_link_on_smooth(self):
        # D^rho f = d^rho f for f with f(0) = 0
        rho = 0.7
        times = graded_grid(1.0, 2000, rho)
        f = _sampled(times, lambda t: t**2)
        i = 1500
        a = rl_derivative(f, rho, float(times[i]))
        b = caputo_derivative(f, rho, float(times[i]))
        assert a == pytest.approx(b, rel=1e-3)

    def test_rho_to_one_limit(self):
        # both derivatives approach f' as rho -> 1
        times = np.linspace(0, 1, 2000)
        f = _sampled(times, lambda t: np.sin(2 * t))
        t0 = float(times[1500])
        want = 2 * math.cos(2 * t0)
        assert caputo_derivative(f, 0.995, t0) == pytest.approx(want, abs=2e-2)


class TestEigenrelations:
    @pytest.mark.parametrize("rho", [0.4, 0.6])
    @pytest.mark.parametrize("lam", [-1.5, 1.0, 3.0])
    def test_rl_mode(self, rho, lam):
        # y = t^{rho-1} E_{rho,rho}(-lam t^rho) satisfies d^rho y = -lam y
        times = graded_grid(2.0, 4096, rho)
        vals = np.zeros(times.size)
        tp = times[1:]
        vals[1:] = tp ** (rho - 1.0) * ml_value_array(rho, rho, -lam * tp**rho)
        f = SampledFunction(times, vals)
        idx = np.nonzero(times >= 0.5)[0][::700]
        for i in idx:
            if i >= times.size - 1:
                continue
            t = float(times[i])
            d = rl_derivative(f, rho, t, leading_exponent=rho - 1.0)
            want = -lam * vals[i]
            assert abs(d - want) / (1.0 + abs(want)) < 1e-3

    @pytest.mark.parametrize("rho", [0.4, 0.6])
    @pytest.mark.parametrize("lam", [-1.5, 3.0])
    def test_caputo_mode(self, rho, lam):
        times = graded_grid(2.0, 4096, rho)
        vals = np.empty(times.size)
        vals[0] = 1.0
        vals[1:] = ml_value_array(rho, 1.0, -lam * times[1:] ** rho)
        f = SampledFunction(times, vals)
        for i in (2000, 3000, 4000):
            t = float(times[i])
            d = caputo_derivative(f, rho, t)
            want = -lam * vals[i]
            assert abs(d - want) / (1.0 + abs(want)) < 1e-3

    def test_integral_identity(self):
        # J^{1-rho}[t^{rho-1} E_{rho,rho}(-t^rho)] = E_{rho,1}(-t^rho)
        rho = 0.5
        times = graded_grid(1.0, 2000, rho)
        vals = np.zeros(times.size)
        tp = times[1:]
        vals[1:] = tp ** (rho - 1.0) * ml_value_array(rho, rho, -tp**rho)
        f = SampledFunction(times, vals)
        t0 = 0.7
        got = frac_integral(f, 1.0 - rho, t0, leading_exponent=rho - 1.0)
        want = ml_point(rho, 1.0, -(t0**rho)).value
        assert got == pytest.approx(want, rel=1e-4)


class TestConvergence:
    def test_residual_shrinks_with_refinement(self):
        # f = t^1.5 is not piecewise linear, so the L1 error is nonzero and
        # must drop by at least 1.8x per grid doubling
        rho, p = 0.5, 1.5
        t0 = 0.8
        want = gamma_fn(p + 1.0) / gamma_fn(p + 1.0 - rho) * t0 ** (p - rho)
        errs = []
        for n in (512, 1024):
            times = graded_grid(1.0, n, rho)
            i = int(np.argmin(np.abs(times - t0)))
            f = SampledFunction(times, times**p)
            errs.append(abs(caputo_derivative(f, rho, float(times[i]))
                            - gamma_fn(p + 1.0) / gamma_fn(p + 1.0 - rho)
                            * times[i] ** (p - rho)))
        assert errs[1] < errs[0] / 1.8


class TestVerifyEquation:
    def test_two_mode_models(self):
        from fracorder.spectral import (
            CAPUTO,
            MonitorPoint,
            SpectralMode,
            SpectralModel,
        )

        pts = (MonitorPoint("a", (0.3,)),)
        modes = (SpectralMode(-2.0, (0.9,)), SpectralMode(1.5, (0.4,)))
        model = SpectralModel(modes, pts)
        rep = verify_equation(model, 0.5, 0, times=graded_grid(2.0, 2048, 0.5))
        assert rep.max_residual < 1e-3
        rep = verify_equation(
            model.with_kind(CAPUTO), 0.5, 0, times=graded_grid(2.0, 1024, 0.5)
        )
        assert rep.max_residual < 1e-3
