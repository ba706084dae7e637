"""Existence checking and regime classification."""

import math

import pytest

from supcar_lab import levy, mixing, regime

IG = levy.InverseGaussian(alpha=1.0, mu=1.0)
SV1 = mixing.SlowlyVarying("constant", 1.0)


def quad_ig_gamma(b, H, d):
    return levy.CharacteristicQuadruple(b, IG, mixing.GammaMix(H), d)


class TestExistenceExampleMatrix:
    """Inverse Gaussian jumps + Gamma mixing: exists iff H > d+2 (b > 0)
    or H > d+1 (b = 0), checked by the quadrature route at threshold
    offsets of +-0.25."""

    @pytest.mark.parametrize("d", [1, 2])
    @pytest.mark.parametrize("b", [1.0, 0.0])
    @pytest.mark.parametrize("off", [-0.25, 0.25])
    def test_threshold(self, d, b, off):
        thr = d + 2 if b > 0 else d + 1
        q = quad_ig_gamma(b, thr + off, d)
        verdict, diag = regime.check_existence(q)
        assert verdict == ("yes" if off > 0 else "no")
        # shortcut route agrees wherever both decide
        assert diag.get("shortcut_verdict") == verdict

    def test_boundary_divergence_detected(self):
        # H exactly at d+2 with b>0: the log factor diverges
        q = quad_ig_gamma(1.0, 3.0, 1)
        verdict, _ = regime.check_existence(q)
        assert verdict in ("no", "undetermined")


class TestRajputRosinski:
    def test_finite_for_example_config(self):
        q = quad_ig_gamma(0.0, 5.0, 1)
        i0, i1, igauss = regime.check_rajput_rosinski(q)
        assert math.isfinite(i0) and i0 > 0.0
        assert math.isfinite(i1)
        assert igauss == 0.0  # no Gaussian part

    def test_gauss_condition_divergence(self):
        # needs H > d+2 = 3; H = 2.5 diverges
        q = quad_ig_gamma(1.0, 2.5, 1)
        _, _, igauss = regime.check_rajput_rosinski(q)
        assert math.isinf(igauss)

    def test_pure_gaussian_has_zero_jump_integrals(self):
        q = levy.CharacteristicQuadruple(1.0, None, mixing.GammaMix(5.0), 1)
        i0, i1, igauss = regime.check_rajput_rosinski(q)
        assert i0 == 0.0 and i1 == 0.0
        assert math.isfinite(igauss)

    def test_agreement_with_existence(self):
        for H, expected in [(4.0, True), (2.5, False)]:
            q = quad_ig_gamma(1.0, H, 1)
            verdict, _ = regime.check_existence(q)
            i0, i1, igauss = regime.check_rajput_rosinski(q)
            rr_ok = all(map(math.isfinite, (i0, i1, igauss)))
            assert (verdict == "yes") == expected
            assert rr_ok == expected


class TestDependence:
    def test_gamma_thresholds(self):
        mk = lambda H, d: levy.CharacteristicQuadruple(1.0, None, mixing.GammaMix(H), d)
        assert regime.dependence_regime(mk(5.0, 1)) == "SRD"
        assert regime.dependence_regime(mk(5.0, 2)) == "LRD"
        assert regime.dependence_regime(mk(8.0, 2)) == "SRD"
        assert regime.dependence_regime(mk(3.5, 1)) == "LRD"

    def test_infinite_variance(self):
        q = levy.CharacteristicQuadruple(1.0, None, mixing.RegVar(2.5, SV1, 1.0), 1)
        assert regime.dependence_regime(q) == "infinite_variance"

    def test_boundary_undetermined(self):
        q = levy.CharacteristicQuadruple(1.0, None, mixing.GammaMix(4.0), 1)
        assert regime.dependence_regime(q) == "undetermined"


def _ts(beta):
    return levy.TemperedStable(beta, 1.0, 1.0, 1.0)


def _rv(alpha):
    return mixing.RegVar(alpha, SV1, 1.0)


class TestLimitClassifier:
    def test_four_regimes(self):
        cases = [
            (levy.CharacteristicQuadruple(1.0, None, mixing.GammaMix(6.0), 1), "brownian"),
            (levy.CharacteristicQuadruple(1.0, None, _rv(3.5), 1), "generalized_brownian"),
            (levy.CharacteristicQuadruple(0.0, _ts(0.5), _rv(3.5), 1), "stable_levy"),
            (levy.CharacteristicQuadruple(0.0, _ts(1.9), _rv(3.5), 1), "stable_integral"),
        ]
        for q, expected in cases:
            rep = regime.limit_regime(q)
            assert rep.limit == expected
            assert rep.exists == "yes"

    def test_boundary_never_rounded(self):
        # beta exactly at alpha/(d+1)
        q = levy.CharacteristicQuadruple(0.0, _ts(1.75), _rv(3.5), 1)
        assert regime.limit_regime(q).limit == "boundary"

    def test_not_covered_combinations(self):
        # b > 0 with alpha <= d+2: existence fails -> not covered
        q = levy.CharacteristicQuadruple(1.0, None, _rv(2.5), 1)
        rep = regime.limit_regime(q)
        assert rep.limit == "not_covered" and rep.exists == "no"
        # b = 0 with alpha >= 2d+2 (SRD jump case is outside the theorems)
        q2 = levy.CharacteristicQuadruple(0.0, _ts(0.5), mixing.RegVar(4.5, SV1, 1.0), 1)
        assert regime.limit_regime(q2).limit == "not_covered"

    def test_zero_bg_index_not_stable(self):
        # IG jumps have index 0: outside the open interval of both stable regimes
        q = levy.CharacteristicQuadruple(0.0, IG, _rv(3.5), 1)
        assert regime.limit_regime(q).limit == "not_covered"

    @pytest.mark.parametrize("d", [1, 2])
    def test_boundary_straddling_grid(self, d):
        """The four-region diagram on a grid straddling every boundary."""
        eps = 0.01
        two_d2 = 2.0 * d + 2.0
        cases = []
        # alpha boundaries with b > 0
        cases += [
            (1.0, None, d + 2.0 + eps, "generalized_brownian"),
            (1.0, None, two_d2 - eps, "generalized_brownian"),
            (1.0, None, two_d2 + eps, "brownian"),
            (1.0, None, two_d2, "boundary"),
            (1.0, None, d + 2.0, "boundary"),
        ]
        for b, beta, alpha, expected in cases:
            q = levy.CharacteristicQuadruple(b, None, _rv(alpha), d)
            assert regime.limit_regime(q).limit == expected, (b, alpha, expected)
        # beta boundaries with b = 0, alpha mid-window
        alpha = d + 1.5 if d == 1 else d + 2.5
        knee = alpha / (d + 1.0)
        upper = min(2.0, alpha - d)
        beta_cases = [
            (knee - eps, "stable_levy"),
            (knee + eps, "stable_integral"),
            (knee, "boundary"),
        ]
        if upper - eps > knee:
            beta_cases.append((upper - eps, "stable_integral"))
        for beta, expected in beta_cases:
            q = levy.CharacteristicQuadruple(0.0, _ts(beta), _rv(alpha), d)
            assert regime.limit_regime(q).limit == expected, (beta, expected)
        # alpha boundaries with b = 0
        q = levy.CharacteristicQuadruple(0.0, _ts(0.4), _rv(d + 1.0 + eps), d)
        assert regime.limit_regime(q).limit == "stable_levy"
        q = levy.CharacteristicQuadruple(0.0, _ts(0.4), _rv(two_d2 + eps), d)
        assert regime.limit_regime(q).limit == "not_covered"

    def test_point_mass_not_covered(self):
        q = levy.CharacteristicQuadruple(1.0, None, mixing.PointMass(1.0), 1)
        rep = regime.limit_regime(q)
        assert rep.exists == "yes" and rep.limit == "not_covered"

    def test_quadrature_route_agrees_on_examples(self):
        for q, expected in [
            (levy.CharacteristicQuadruple(1.0, IG, mixing.GammaMix(6.0), 1), "brownian"),
            (levy.CharacteristicQuadruple(0.0, _ts(0.5), _rv(3.5), 1), "stable_levy"),
        ]:
            r1 = regime.limit_regime(q, existence_route="shortcut")
            r2 = regime.limit_regime(q, existence_route="quadrature")
            assert r1.limit == r2.limit == expected
            assert r1.exists == r2.exists == "yes"
