"""Special-function kernel: spec examples, identities, and oracles.

Oracles stay independent of the implementation: closed forms from
elementary functions, quadrature of defining integrals, and mpmath
reference series.
"""

import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from supcar_lab import specfun as sf

mp.mp.dps = 30


class TestBesselK:
    def test_half_integer_closed_form(self):
        # K_{1/2}(x) = sqrt(pi/(2x)) e^-x, evaluated independently
        assert math.isclose(
            sf.bessel_k(0.5, 1.0), 0.46106850444789445, rel_tol=1e-12
        )
        for x in np.geomspace(1e-5, 50.0, 40):
            closed = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x)
            assert abs(sf.bessel_k(0.5, x) - closed) <= 1e-10 * closed

    def test_three_halves_closed_form(self):
        assert math.isclose(sf.bessel_k(1.5, 2.0), 0.17990665795209195, rel_tol=1e-12)
        for x in np.geomspace(1e-4, 40.0, 30):
            closed = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * (1.0 + 1.0 / x)
            assert abs(sf.bessel_k(1.5, x) - closed) <= 1e-10 * closed

    def test_five_halves_via_recurrence_oracle(self):
        # K_{5/2} = K_{1/2} + (3/x) K_{3/2} from the closed半-integer forms
        for x in np.geomspace(1e-3, 30.0, 20):
            k12 = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x)
            k32 = k12 * (1.0 + 1.0 / x)
            oracle = k12 + (3.0 / x) * k32
            assert abs(sf.bessel_k(2.5, x) - oracle) <= 1e-10 * oracle

    def test_recurrence_identity(self):
        for nu in [0.2, 0.5, 1.0, 2.3, 4.8]:
            for x in [0.05, 0.7, 2.0, 5.0, 60.0]:
                lhs = sf.bessel_k(nu + 1.0, x)
                rhs = sf.bessel_k(nu - 1.0, x) + (2.0 * nu / x) * sf.bessel_k(nu, x)
                assert abs(lhs - rhs) <= 1e-9 * abs(rhs)

    def test_monotone_decay_to_zero(self):
        vals = [sf.bessel_k(1.7, x) for x in [1.0, 5.0, 25.0, 125.0, 650.0]]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-270

    def test_underflow_flag(self):
        res = sf.bessel_k_result(0.5, 800.0)
        assert res.value == 0.0 and res.underflow

    def test_range_accuracy_vs_mpmath(self):
        for nu in [0.0, 0.3, 1.5, 3.7, 10.0]:
            for x in [1e-6, 0.01, 1.0, 2.0, 10.0, 300.0, 700.0]:
                ref = float(mp.besselk(nu, x))
                if ref > 0.0:
                    assert abs(sf.bessel_k(nu, x) - ref) <= 1e-10 * ref

    def test_domain_errors(self):
        with pytest.raises(sf.SpecFunDomainError):
            sf.bessel_k(1.0, 0.0)
        with pytest.raises(sf.SpecFunDomainError):
            sf.bessel_k(1.0, -2.0)
        with pytest.raises(sf.SpecFunDomainError):
            sf.bessel_k(math.nan, 1.0)


class TestGamma:
    def test_basic_values(self):
        assert sf.gamma_fn(1.0) == 1.0
        assert math.isclose(sf.gamma_fn(0.5), 1.7724538509055160, rel_tol=1e-14)
        assert sf.gamma_fn(5.0) == 24.0

    def test_accuracy_window(self):
        for x in np.geomspace(1e-3, 170.0, 60):
            ref = float(mp.gamma(x))
            assert abs(sf.gamma_fn(x) - ref) <= 1e-13 * ref

    def test_pole_and_overflow(self):
        with pytest.raises(sf.SpecFunPoleError):
            sf.gamma_fn(0.0)
        with pytest.raises(sf.SpecFunPoleError):
            sf.gamma_fn(-3.0)
        assert math.isinf(sf.gamma_fn(200.0))


class TestIncompleteGamma:
    def test_exponential_case(self):
        assert math.isclose(sf.incomplete_gamma_upper(1.0, 2.0), math.exp(-2.0), rel_tol=1e-13)

    def test_zero_argument_is_full_gamma(self):
        for a in [0.4, 1.0, 3.3, 9.0]:
            assert math.isclose(sf.incomplete_gamma_upper(a, 0.0), sf.gamma_fn(a), rel_tol=1e-13)

    def test_quadrature_oracle(self):
        # adaptive quadrature of the defining integral; Gamma(3,5) = 37 e^-5
        for a, x in [(3.0, 5.0), (0.7, 0.2), (2.5, 9.0), (6.0, 1.5)]:
            oracle, _ = integrate.quad(
                lambda t: t ** (a - 1.0) * math.exp(-t), x, x + 400.0
            )
            assert abs(sf.incomplete_gamma_upper(a, x) - oracle) <= 1e-10 * oracle
        assert math.isclose(
            sf.incomplete_gamma_upper(3.0, 5.0), 37.0 * math.exp(-5.0), rel_tol=1e-12
        )

    def test_complement_identity(self):
        for a in [0.3, 1.0, 4.5, 20.0]:
            for x in [0.1, 1.0, 3.0, 30.0]:
                total = sf.incomplete_gamma_upper(a, x) + sf.incomplete_gamma_lower(a, x)
                assert abs(total - sf.gamma_fn(a)) <= 1e-12 * sf.gamma_fn(a)

    def test_domain_errors(self):
        with pytest.raises(sf.SpecFunDomainError):
            sf.incomplete_gamma_upper(-1.0, 2.0)
        with pytest.raises(sf.SpecFunDomainError):
            sf.incomplete_gamma_upper(1.0, -0.5)


class TestBesselMomentIdentity:
    def test_moment_identity_by_quadrature(self):
        # int_0^inf lam^(mu-1) K_nu(lam) d lam = 2^(mu-2) G((mu-nu)/2) G((mu+nu)/2)
        for mu, nu in [(2.5, 1.5), (3.0, 1.5), (4.0, 2.0), (2.2, 0.5)]:
            closed = 2.0 ** (mu - 2.0) * math.gamma(0.5 * (mu - nu)) * math.gamma(0.5 * (mu + nu))
            val, _ = integrate.quad(
                lambda lam: lam ** (mu - 1.0) * sf.bessel_k(nu, lam), 1e-12, 120.0,
                limit=300,
            )
            assert abs(val - closed) <= 1e-8 * closed


class TestHyp2F1:
    def test_empty_series(self):
        assert sf.hyp2f1(2.3, -1.7, 4.4, 0.0) == 1.0

    def test_log_identity(self):
        # 2F1(1,1;2;z) = -ln(1-z)/z
        for z in [0.5, -0.3, -5.0, 0.85]:
            oracle = -math.log1p(-z) / z
            assert abs(sf.hyp2f1(1.0, 1.0, 2.0, z) - oracle) <= 1e-12 * abs(oracle)
        assert math.isclose(sf.hyp2f1(1, 1, 2, 0.5), 1.3862943611198906, rel_tol=1e-12)

    def test_large_negative_transformed_series_oracle(self):
        # high-precision series at the transformed argument via mpmath
        cases = [(1.5, 1.0, 2.5, -99.0), (3.0, 2.5, 4.0, -3.0), (2.2, 0.4, 3.3, -1e6)]
        for a, b, c, z in cases:
            ref = float(mp.hyp2f1(a, b, c, z))
            assert abs(sf.hyp2f1(a, b, c, z) - ref) <= 1e-9 * abs(ref)

    def test_gauss_value_at_one(self):
        for a, b, c in [(1.0, 0.5, 3.0), (0.3, 0.9, 2.6), (1.2, 1.1, 4.0)]:
            closed = (
                sf.gamma_fn(c)
                * sf.gamma_fn(c - a - b)
                / (sf.gamma_fn(c - a) * sf.gamma_fn(c - b))
            )
            assert abs(sf.hyp2f1(a, b, c, 1.0) - closed) <= 1e-9 * abs(closed)

    def test_covariance_parameter_family(self):
        # the exact parameter family the Gamma-mixing covariance uses
        for H in [5.0, 6.0, 8.0]:
            for d in [1, 2]:
                a, b, c = (H + 1.0) / 2.0, H / 2.0, H - d / 2.0 - 0.5
                for t in [0.5, 1.0, 2.0, 31.6, 1000.0]:
                    z = 1.0 - t * t
                    ref = float(mp.hyp2f1(a, b, c, z))
                    assert abs(sf.hyp2f1(a, b, c, z) - ref) <= 1e-9 * abs(ref)

    def test_degenerate_connection_reported(self):
        # c - a - b integer with z near 1: report, do not regularize
        with pytest.raises(sf.SpecFunConvergenceError):
            sf.hyp2f1(3.0, 2.5, 3.5, 0.9975)
        # a - b integer deep in the left tail: beyond the Pfaff fallback
        with pytest.raises(sf.SpecFunConvergenceError):
            sf.hyp2f1(2.0, 1.0, 3.7, -1e6)
        # a - b integer at moderate z: served exactly by the Pfaff map
        ref = float(mp.hyp2f1(2.0, 1.0, 3.7, -50.0))
        assert abs(sf.hyp2f1(2.0, 1.0, 3.7, -50.0) - ref) <= 1e-9 * abs(ref)

    def test_pole_and_domain(self):
        with pytest.raises(sf.SpecFunPoleError):
            sf.hyp2f1(1.0, 1.0, 0.0, 0.3)
        with pytest.raises(sf.SpecFunDomainError):
            sf.hyp2f1(1.0, 1.0, 2.0, 1.5)
        with pytest.raises(sf.SpecFunDomainError):
            sf.hyp2f1(2.0, 3.0, 4.0, 1.0)  # needs c - a - b > 0 at z = 1

    def test_terminating_polynomial(self):
        # b a non-positive integer: finite sum, any z allowed below 1
        val = sf.hyp2f1(1.3, -2.0, 2.2, -8.0)
        ref = float(mp.hyp2f1(1.3, -2, 2.2, -8.0))
        assert abs(val - ref) <= 1e-12 * abs(ref)


class TestResultContract:
    def test_error_fields_nonnegative(self):
        for res in [
            sf.bessel_k_result(1.2, 3.0),
            sf.gamma_fn_result(4.4),
            sf.incomplete_gamma_upper_result(2.0, 3.0),
            sf.hyp2f1_result(1.0, 2.0, 3.0, 0.4),
        ]:
            assert res.est_abs_error >= 0.0

    def test_expint_matches_upper_gamma_limit(self):
        # E1 doubles as Gamma(0, x): check against quadrature
        for x in [0.3, 1.0, 4.0]:
            oracle, _ = integrate.quad(lambda t: math.exp(-t) / t, x, x + 200.0)
            assert abs(sf.expint_e1(x) - oracle) <= 1e-10 * oracle
