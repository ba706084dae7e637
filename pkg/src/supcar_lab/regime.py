"""Existence checking and regime classification.

The executable form of the parameter-space diagram: quadrature routes
for the existence theorem's integrals, the Rajput-Rosinski integrals,
the regular-variation shortcut, and the four-way limit classifier.
Boundary parameter values are reported as boundaries, never rounded
into a regime.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import levy as levy_mod
from . import mixing
from ._quad import probe_halfline, quad
from .levy import CharacteristicQuadruple

_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class RegimeReport:
    exists: str  # "yes" | "no" | "undetermined"
    existence_criterion: str
    dependence: str  # "SRD" | "LRD" | "infinite_variance" | "undetermined"
    limit: str  # "brownian" | "generalized_brownian" | "stable_integral"
    #              | "stable_levy" | "boundary" | "not_covered"
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# fast moment profiles (tables for the quadrature-backed IG family;
# incomplete-gamma closed forms are already cheap for the other families)


def _needs_table(levy) -> bool:
    return isinstance(levy, levy_mod.InverseGaussian)


@functools.lru_cache(maxsize=None)
def _below_table(levy, p: float) -> tuple[np.ndarray, np.ndarray]:
    """log-log table of y -> integral_{|x| <= y} |x|^p W(dx) on (1e-8, 1e3)."""
    ys = np.geomspace(1e-8, 1e3, 300)
    vals = np.array([levy_mod.partial_abs_moment(levy, p, 0.0, float(y)) for y in ys])
    return np.log(ys), np.log(np.maximum(vals, 1e-300))


def _moment_below(levy, p: float, y: float) -> float:
    """integral_{|x| <= y} |x|^p W(dx)."""
    if y <= 0.0:
        return 0.0
    if _needs_table(levy):
        ly, lv = _below_table(levy, p)
        yy = min(max(y, 1e-8), 1e3)
        return float(np.exp(np.interp(math.log(yy), ly, lv)))
    return levy_mod.partial_abs_moment(levy, p, 0.0, y)


def _side_below(levy, p: float, y: float, side: str) -> float:
    if y <= 0.0:
        return 0.0
    if _needs_table(levy):
        if side == "minus":
            return 0.0
        return _moment_below(levy, p, y)
    return levy_mod.partial_side_moment(levy, p, 0.0, y, side)


def _mid_moment(levy, p: float, y: float) -> float:
    """integral_{y <= |x| <= 1} |x|^p W(dx)."""
    if y >= 1.0:
        return 0.0
    if _needs_table(levy):
        # IG below-moments are finite, so the difference form is safe
        return max(_moment_below(levy, p, 1.0) - _moment_below(levy, p, y), 0.0)
    return levy_mod.partial_abs_moment(levy, p, y, 1.0)


# ---------------------------------------------------------------------------
# log-space integrand assembly (lam^power can overflow long before the
# full pi-weighted integrand stops being negligible)


def _pi_integrand(
    mix: mixing.MixingMeasure, lam: float, log_pow: int, lam_pow: float, extra: float = 1.0
) -> float:
    """|ln lam|^log_pow * lam^lam_pow * p(lam) * extra, assembled in logs."""
    if extra <= 0.0:
        return 0.0
    logd = mixing.log_density(mix, lam)
    if logd == -math.inf:
        return 0.0
    expo = logd + lam_pow * math.log(lam) + math.log(extra)
    if expo > 705.0:
        return 1e308
    if expo < -740.0:
        return 0.0
    ll = abs(math.log(lam))
    return (ll**log_pow if log_pow > 0 else 1.0) * math.exp(expo)


# ---------------------------------------------------------------------------
# existence


def check_existence(q: CharacteristicQuadruple) -> tuple[str, dict]:
    """Existence verdict by quadrature of the defining integrals.

    Evaluates the log-moment condition on W and the pi-side condition(s)
    for the b > 0 / b = 0 cases, each with truncation-doubling divergence
    detection.  For regularly varying mixing measures the exponent
    shortcut is evaluated as a second route and reported alongside.
    """
    d = q.d
    diag: dict = {}

    if isinstance(q.mix, mixing.PointMass):
        diag["note"] = "degenerate mixing: single-rate field always exists"
        return "yes", diag

    if q.levy is not None:
        lm = levy_mod.log_moment(q.levy, d)
        diag["log_moment"] = lm
        if not math.isfinite(lm):
            return "no", diag

    if q.b > 0.0:
        probe = probe_halfline(
            lambda lam: _pi_integrand(q.mix, lam, d, -(d + 2.0)),
            upper=_support_upper(q.mix),
        )
        diag["pi_log_integral_b_positive"] = probe.value
        verdict = "yes" if probe.converged else "no"
    else:
        e1 = probe_halfline(
            lambda lam: _pi_integrand(q.mix, lam, d - 1, -(d + 1.0)),
            upper=_support_upper(q.mix),
        )
        diag["pi_log_integral_b_zero"] = e1.value
        probes = [e1]
        if q.levy is not None:
            d0 = probe_halfline(
                lambda lam: _pi_integrand(
                    q.mix, lam, d - 1, -(d + 2.0), _moment_below(q.levy, 2.0, 2.0 * lam)
                ),
                upper=0.5,
            )
            diag["double_integral_x2"] = d0.value
            probes.append(d0)
            for k in (1, 2):
                dk = probe_halfline(
                    lambda lam, k=k: _pi_integrand(
                        q.mix, lam, d, -(d + 2.0 - k), _mid_moment(q.levy, 2.0 - k, 2.0 * lam)
                    ),
                    upper=0.5,
                )
                diag[f"double_integral_k{k}"] = dk.value
                probes.append(dk)
        verdict = "yes" if all(p.converged for p in probes) else "no"

    try:
        alpha = q.mix.alpha
    except (AttributeError, ValueError):
        alpha = None
    if alpha is not None:
        if q.b > 0.0:
            thr = d + 2.0
            diag["shortcut"] = f"alpha > d+2 ({alpha} vs {thr})"
        else:
            beta = levy_mod.bg_index(q.levy) if q.levy is not None else 0.0
            thr = max(d + beta, d + 1.0)
            diag["shortcut"] = f"alpha > max(d+beta_BG, d+1) ({alpha} vs {thr})"
        diag["shortcut_verdict"] = "yes" if alpha > thr else "no"
        if abs(alpha - thr) < 1e-12:
            return "undetermined", diag
    return verdict, diag


def _support_upper(m: mixing.MixingMeasure) -> float:
    return m.lambda_max if isinstance(m, mixing.RegVar) else math.inf


# ---------------------------------------------------------------------------
# Rajput-Rosinski integrals


def _v0_profile(levy, r: float) -> float:
    if r == 0.0:
        return 0.0
    inv = 1.0 / r
    small = _moment_below(levy, 2.0, inv)
    tails = levy_mod.tail_mass(levy, inv, "plus") + levy_mod.tail_mass(levy, inv, "minus")
    return r * r * small + tails


def _v1_profile(levy, r: float) -> float:
    if r == 0.0 or r == 1.0:
        return 0.0
    out = 0.0
    inv = 1.0 / r
    for side, sgn in (("plus", 1.0), ("minus", -1.0)):
        if r < 1.0:
            m1 = _side_below(levy, 1.0, inv, side) - _side_below(levy, 1.0, 1.0, side)
            m0 = _side_below(levy, 0.0, inv, side) - _side_below(levy, 0.0, 1.0, side)
            piece = r * (m1 - m0) + (1.0 - r) * levy_mod.tail_mass(levy, inv, side)
        else:
            m1 = _side_below(levy, 1.0, 1.0, side) - _side_below(levy, 1.0, inv, side)
            m0 = _side_below(levy, 0.0, 1.0, side) - _side_below(levy, 0.0, inv, side)
            piece = m0 - r * m1 + (1.0 - r) * levy_mod.tail_mass(levy, 1.0, side)
        out += sgn * piece
    return out


def check_rajput_rosinski(q: CharacteristicQuadruple) -> tuple[float, float, float]:
    """(I0, I1, I_gauss): the stochastic-integral existence integrals,
    each +inf when its truncation-doubling probe diverges."""
    d = q.d
    surface = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)

    if q.levy is None:
        i0 = i1 = 0.0
    else:

        def inner(lam: float, vfun) -> float:
            # radial integral recast in r = e^(-lam rho) / (2 lam)
            log_top = -math.log(2.0 * lam)

            def f(logr: float) -> float:
                r = math.exp(logr)
                return abs(logr - log_top) ** (d - 1) * vfun(q.levy, r) if d > 1 else vfun(
                    q.levy, r
                )

            val, _ = quad(f, log_top - 80.0, log_top, epsrel=1e-8, epsabs=1e-300)
            return val

        def outer(lam: float, vfun) -> float:
            inn = inner(lam, vfun)
            return _pi_integrand(q.mix, lam, 0, -float(d), inn)

        p0 = probe_halfline(
            lambda lam: outer(lam, _v0_profile), upper=_support_upper(q.mix)
        )
        p1 = probe_halfline(
            lambda lam: outer(lam, lambda l, r: abs(_v1_profile(l, r))),
            upper=_support_upper(q.mix),
        )
        i0 = surface * p0.value if p0.converged else math.inf
        i1 = surface * p1.value if p1.converged else math.inf

    if q.b > 0.0:
        pg = probe_halfline(
            lambda lam: _pi_integrand(q.mix, lam, 0, -(d + 2.0)),
            upper=_support_upper(q.mix),
        )
        gauss = (
            surface * math.gamma(float(d)) * 2.0 ** (-d) * pg.value
            if pg.converged
            else math.inf
        )
    else:
        gauss = 0.0
    return i0, i1, gauss


# ---------------------------------------------------------------------------
# dependence and limit classification


def dependence_regime(q: CharacteristicQuadruple) -> str:
    """SRD / LRD / infinite_variance from the mixing measure's negative
    moments; the covariance is integrable iff alpha > 2d + 2."""
    d = q.d
    if isinstance(q.mix, mixing.PointMass):
        return "SRD"
    if math.isinf(mixing.neg_moment(q.mix, d + 2.0)):
        return "infinite_variance"
    alpha = q.mix.alpha
    if abs(alpha - (2.0 * d + 2.0)) < _BOUNDARY_TOL * max(1.0, alpha):
        return "undetermined"
    return "SRD" if alpha > 2.0 * d + 2.0 else "LRD"


def limit_regime(q: CharacteristicQuadruple, *, existence_route: str = "shortcut") -> RegimeReport:
    """Classify the limit of the integrated field per the four theorems.

    ``existence_route`` selects the regular-variation shortcut (fast) or
    the full quadrature route for the existence gate.  Threshold
    equalities are reported as 'boundary', never rounded into a regime.
    """
    d = q.d
    diag: dict = {}
    if existence_route == "quadrature":
        exists, ediag = check_existence(q)
    else:
        exists, ediag = _exists_shortcut(q)
    diag.update(ediag)
    dependence = dependence_regime(q) if exists == "yes" else "undetermined"

    if exists == "undetermined":
        # threshold equality in the existence conditions: a diagram boundary
        return RegimeReport(exists, existence_route, dependence, "boundary", diag)
    if exists != "yes" or isinstance(q.mix, mixing.PointMass):
        return RegimeReport(exists, existence_route, dependence, "not_covered", diag)

    alpha = q.mix.alpha
    two_d2 = 2.0 * d + 2.0
    diag["alpha"] = alpha

    def near(x: float, yv: float) -> bool:
        return abs(x - yv) < _BOUNDARY_TOL * max(1.0, abs(yv))

    if q.b > 0.0:
        if near(alpha, two_d2) or near(alpha, d + 2.0):
            limit = "boundary"
        elif alpha > two_d2:
            limit = "brownian"
        elif d + 2.0 < alpha < two_d2:
            limit = "generalized_brownian"
        else:
            limit = "not_covered"
        return RegimeReport(exists, existence_route, dependence, limit, diag)

    beta = levy_mod.bg_index(q.levy) if q.levy is not None else 0.0
    diag["beta_bg"] = beta
    if not d + 1.0 < alpha < two_d2:
        limit = "boundary" if near(alpha, d + 1.0) or near(alpha, two_d2) else "not_covered"
        return RegimeReport(exists, existence_route, dependence, limit, diag)
    knee = alpha / (d + 1.0)
    upper = min(2.0, alpha - d)
    if near(beta, knee):
        limit = "boundary"
    elif 0.0 < beta < knee:
        limit = "stable_levy"
    elif knee < beta < upper:
        limit = "stable_integral"
    else:
        limit = "not_covered"
    return RegimeReport(exists, existence_route, dependence, limit, diag)


def _exists_shortcut(q: CharacteristicQuadruple) -> tuple[str, dict]:
    d = q.d
    diag: dict = {}
    if isinstance(q.mix, mixing.PointMass):
        return "yes", diag
    if q.levy is not None:
        lm = levy_mod.log_moment(q.levy, d)
        diag["log_moment"] = lm
        if not math.isfinite(lm):
            return "no", diag
    alpha = q.mix.alpha
    if q.b > 0.0:
        thr = d + 2.0
    else:
        beta = levy_mod.bg_index(q.levy) if q.levy is not None else 0.0
        thr = max(d + beta, d + 1.0)
    diag["alpha_threshold"] = thr
    if abs(alpha - thr) < _BOUNDARY_TOL * max(1.0, thr):
        return "undetermined", diag
    return ("yes" if alpha > thr else "no"), diag
