"""Window integration, limit-experiment machinery, and the statistics
used to test each limit's signature."""

import math

import numpy as np
import pytest

from supcar_lab import levy, limitlab, mixing, simulate
from supcar_lab.windows import WindowSpec

W1 = WindowSpec("cube", 1.0)


def flat_grid(value=1.0, n=512, h=0.1):
    vals = np.full(n, value)
    return simulate.FieldGrid(1, n, h, -0.5 * n * h, vals)


class TestIntegrateWindow:
    def test_constant_field(self):
        g = flat_grid(2.5)
        val = limitlab.integrate_window(g, 10.0, W1)
        # cell centers inside [-5, 5]: 100 cells of width 0.1
        assert abs(val - 2.5 * 10.0) <= 2.5 * g.h

    def test_shrinks_to_zero(self):
        g = flat_grid(3.0)
        assert limitlab.integrate_window(g, 0.0, W1) == 0.0
        tiny = limitlab.integrate_window(g, 0.01, W1)
        assert tiny in (0.0, pytest.approx(3.0 * g.h, abs=1e-12))

    def test_linear_field_cancels(self):
        g = flat_grid(0.0)
        g.values = g.axis().copy()  # f(x) = x
        val = limitlab.integrate_window(g, 20.0, W1)
        assert abs(val) <= 2.0 * g.h  # odd integrand, O(h) cell asymmetry

    def test_overflow_error(self):
        g = flat_grid()
        with pytest.raises(ValueError):
            limitlab.integrate_window(g, 1e6, W1)

    def test_ball_window_d2(self):
        vals = np.ones((64, 64))
        g = simulate.FieldGrid(2, 64, 0.25, -8.0, vals)
        w = WindowSpec("ball", 0.5)
        val = limitlab.integrate_window(g, 10.0, w)
        assert abs(val - math.pi * 5.0**2) <= 0.05 * math.pi * 25.0


class TestWindowSpec:
    def test_volume(self):
        assert W1.volume(1) == 1.0
        assert W1.volume(2) == 1.0
        assert math.isclose(WindowSpec("ball", 0.5).volume(2), math.pi * 0.25, rel_tol=1e-12)

    def test_unit_ball_constraint(self):
        with pytest.raises(ValueError):
            WindowSpec("cube", 3.0).validate(1)
        with pytest.raises(ValueError):
            WindowSpec("ball", 1.5).validate(2)
        WindowSpec("cube", 1.0).validate(2)  # diagonal sqrt(2)/2 < 1


class TestEstimators:
    def test_ecf_gaussian(self):
        rng = np.random.default_rng(5)
        g, ci = limitlab.stability_index_ecf(rng.normal(size=10_000), rng=rng)
        assert abs(g - 2.0) <= 0.05
        assert ci[0] <= g <= ci[1]

    def test_ecf_cauchy(self):
        rng = np.random.default_rng(6)
        g, _ = limitlab.stability_index_ecf(rng.standard_cauchy(10_000), rng=rng)
        assert abs(g - 1.0) <= 0.05

    def test_ecf_degenerate_rejected(self):
        with pytest.raises(ValueError):
            limitlab.stability_index_ecf(np.ones(2000))

    def test_ks_normal_passes_exponential_fails(self):
        rng = np.random.default_rng(7)
        d, thr, ok = limitlab.gaussianity_test(rng.normal(size=10_000))
        assert ok and d <= thr
        d2, thr2, ok2 = limitlab.gaussianity_test(rng.exponential(size=10_000))
        assert not ok2 and d2 > thr2

    def test_variance_scaling_exact_power_law(self):
        rng = np.random.default_rng(8)
        T = [32.0, 64.0, 128.0, 256.0]
        samples = [rng.normal(0.0, t**0.5, size=4000) for t in T]  # Var = T
        slope, _, ci = limitlab.variance_scaling_fit(T, samples, rng=rng)
        assert abs(slope - 1.0) <= 0.05
        assert ci[0] <= slope <= ci[1]

    def test_boundary_exponent_identity(self):
        for alpha, d in [(3.5, 1), (5.0, 2), (2.7, 1)]:
            a, b = limitlab.exponent_boundary_identity(alpha, d)
            assert math.isclose(a, b, rel_tol=1e-12)


class TestExperimentMechanics:
    @pytest.fixture(scope="class")
    def mini_report(self):
        q = levy.CharacteristicQuadruple(1.0, None, mixing.GammaMix(6.0), d=1)
        plan = limitlab.default_plan(
            1, "brownian", T_ladder=(24.0, 48.0), replicates=50, n=2**10, lambda_bins=24
        )
        return limitlab.run_limit_experiment(q, W1, 2024, plan)

    def test_report_shapes(self, mini_report):
        rep = mini_report
        assert rep.regime == "brownian"
        assert len(rep.raw) == 2 and rep.raw[0].shape == (50, 4)
        assert len(rep.normalizers) == 2
        assert all(np.isfinite(z).all() for z in rep.normalized)

    def test_nested_window_coupling(self, mini_report):
        # Z[t1] and Z[t2] come from the same realization: strongly correlated
        z = mini_report.normalized[-1]
        corr = np.corrcoef(z[:, 0], z[:, -1])[0, 1]
        assert corr > 0.3

    def test_determinism_and_worker_invariance(self):
        q = levy.CharacteristicQuadruple(1.0, None, mixing.GammaMix(6.0), d=1)
        plan = limitlab.default_plan(
            1, "brownian", T_ladder=(16.0, 32.0), replicates=8, n=2**9, lambda_bins=8
        )
        r1 = limitlab.run_limit_experiment(q, W1, 7, plan, workers=1)
        r2 = limitlab.run_limit_experiment(q, W1, 7, plan, workers=2)
        assert np.array_equal(r1.raw[0], r2.raw[0])
        assert r1.normalizers == r2.normalizers

    def test_outside_regimes_rejected(self):
        q = levy.CharacteristicQuadruple(
            1.0, None, mixing.RegVar(2.5, mixing.SlowlyVarying("constant", 1.0), 1.0), 1
        )
        with pytest.raises(ValueError):
            limitlab.run_limit_experiment(q, W1, 1)
