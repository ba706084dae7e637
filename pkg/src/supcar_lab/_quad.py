"""Internal quadrature helpers shared by the analytics and regime modules.

Half-line integrals are evaluated after the substitution lam = e^u so
power singularities at zero and exponential tails both become smooth;
divergence is detected by truncation doubling rather than symbolically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

from scipy import integrate

# widest representable window in u = ln(lam)
_U_MIN = -700.0
_U_MAX = 700.0


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the requested accuracy."""


def quad(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    epsabs: float = 1e-12,
    epsrel: float = 1e-10,
    points: list[float] | None = None,
    limit: int = 200,
) -> tuple[float, float]:
    """scipy.integrate.quad with warnings demoted to the error estimate."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if points is not None and math.isfinite(a) and math.isfinite(b):
            pts = [p for p in points if a < p < b]
            val, err = integrate.quad(
                f, a, b, epsabs=epsabs, epsrel=epsrel, points=pts or None, limit=limit
            )
        else:
            val, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
    return val, err


def integrate_halfline(
    g: Callable[[float], float],
    *,
    lower: float = 0.0,
    upper: float = math.inf,
    epsrel: float = 1e-10,
    epsabs: float = 1e-300,
) -> tuple[float, float]:
    """integral_lower^upper g(lam) d lam via the exponential substitution.

    Suited to integrands with a power behaviour at 0 and exponential or
    power decay at infinity.  A positive ``lower`` becomes the window
    edge (so narrow supports are not missed); with lower = 0 the window
    is grown toward the origin until the added panels stop mattering.
    """

    def gu(u: float) -> float:
        lam = math.exp(u)
        try:
            return g(lam) * lam
        except OverflowError:
            return 1e308

    u_hi = min(math.log(upper), _U_MAX) if math.isfinite(upper) else 40.0
    hard_lo = math.log(lower) if lower > 0.0 else _U_MIN
    u_lo = max(-40.0, hard_lo)
    if u_lo >= u_hi:
        return 0.0, 0.0
    # seed panels so an interior narrow support cannot be missed; sampled
    # magnitudes set the absolute floor and let negligible panels skip
    # refinement instead of grinding against an impossible tolerance
    edges = [u_lo + (u_hi - u_lo) * k / 8.0 for k in range(9)]
    panel_scales = []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes = [a + (b - a) * j / 8.0 for j in range(1, 8)]
        panel_scales.append((b - a) * max(abs(gu(u)) for u in nodes))
    scale = max(sum(panel_scales), 1e-280)
    eps_floor = max(epsabs, scale * epsrel * 0.05)
    val, err = 0.0, 0.0
    for (a, b), pscale in zip(zip(edges[:-1], edges[1:]), panel_scales):
        if pscale < 0.005 * eps_floor:
            continue  # provably below the accuracy target
        v, e = quad(gu, a, b, epsabs=eps_floor, epsrel=epsrel, limit=60)
        val += v
        err += e
    # expand the window until the added panels stop mattering
    for _ in range(20):
        grew = False
        if u_lo > hard_lo:
            new_lo = max(u_lo - 80.0, hard_lo)
            tail, terr = quad(gu, new_lo, u_lo, epsabs=epsabs, epsrel=epsrel)
            if abs(tail) > max(abs(val), 1e-280) * epsrel * 0.01:
                val += tail
                err += terr
                grew = True
            u_lo = new_lo
        if not math.isfinite(upper) and u_hi < _U_MAX:
            new_hi = min(u_hi + 40.0, _U_MAX)
            tail, terr = quad(gu, u_hi, new_hi, epsabs=epsabs, epsrel=epsrel)
            if abs(tail) > max(abs(val), 1e-280) * epsrel * 0.01:
                val += tail
                err += terr
                grew = True
            u_hi = new_hi
        if not grew:
            break
    return val, err


def _simpson_panel(f, a: float, m: float, b: float, fa, fm, fb) -> complex:
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_complex(
    f: Callable[[float], complex],
    a: float,
    b: float,
    *,
    tol: float,
    max_depth: int = 28,
) -> complex:
    """Adaptive Simpson for complex integrands with |.|-based refinement.

    Both components share one subdivision tree, so a vanishing imaginary
    part rides along at the absolute accuracy of the complex magnitude
    instead of forcing its own relative tolerance.
    """
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = _simpson_panel(f, a, 0.5 * (a + b), b, fa, fm, fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth) -> complex:
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = _simpson_panel(f, a, lm, m, fa, flm, fm)
        right = _simpson_panel(f, m, rm, b, fm, frm, fb)
        delta = abs(left + right - whole)
        noise = 5e-15 * (abs(left) + abs(right)) + 1e-300
        if depth >= max_depth or delta <= 15.0 * tol or delta <= noise:
            return left + right + (left + right - whole) / 15.0
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + recurse(
            m, b, fm, frm, fb, right, 0.5 * tol, depth + 1
        )

    return recurse(a, b, fa, fm, fb, whole, tol, 0)


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of a truncation-doubling divergence probe."""

    converged: bool
    value: float
    error: float
    panels: int

    @property
    def diverged(self) -> bool:
        return not self.converged


def probe_halfline(
    g: Callable[[float], float],
    *,
    upper: float = math.inf,
    rel_increment: float = 1e-3,
    divergence_doublings: int = 6,
    max_doublings: int = 72,
) -> ProbeResult:
    """Integrate g over (0, upper) while watching the origin for divergence.

    The window toward 0 is doubled panel by panel; the integral is
    declared divergent when the relative increment refuses to fall below
    ``rel_increment`` over ``divergence_doublings`` consecutive doublings
    while the panel contributions are not shrinking.
    """

    def gu(u: float) -> float:
        lam = math.exp(u)
        try:
            return g(lam) * lam
        except OverflowError:
            return 1e308

    u_hi = min(math.log(upper), _U_MAX) if math.isfinite(upper) else 60.0
    if not math.isfinite(upper):
        # grow the +inf side conservatively first
        hi_val = 0.0
        edge = 1.0
        while edge < u_hi:
            p, _ = quad(gu, edge, min(edge * 2.0, u_hi))
            hi_val += p
            edge *= 2.0
        head, _ = quad(gu, 0.0, 1.0)
        total = hi_val + head
        u_edge = 0.0
    else:
        total = 0.0
        u_edge = u_hi

    stubborn = 0
    prev_panel = math.inf
    panels = 0
    width = 1.0
    while panels < max_doublings and u_edge - width > _U_MIN:
        panel, _ = quad(gu, u_edge - width, u_edge)
        u_edge -= width
        width = min(width * 2.0, 160.0)
        total += panel
        panels += 1
        denom = max(abs(total), 1e-280)
        rel = abs(panel) / denom
        if rel < rel_increment:
            if abs(panel) < abs(prev_panel) or panel == 0.0:
                # one confirming panel then accept
                confirm, _ = quad(gu, max(u_edge - width, _U_MIN), u_edge)
                if abs(confirm) < rel_increment * max(abs(total + confirm), 1e-280):
                    return ProbeResult(True, total + confirm, abs(confirm), panels + 1)
            stubborn = 0
        else:
            if abs(panel) >= 0.5 * abs(prev_panel):
                stubborn += 1
            else:
                stubborn = 0
            if stubborn >= divergence_doublings:
                return ProbeResult(False, math.inf, math.inf, panels)
        prev_panel = panel
    # ran out of representable range: decide by the last panel trend
    if abs(prev_panel) < rel_increment * max(abs(total), 1e-280):
        return ProbeResult(True, total, abs(prev_panel), panels)
    return ProbeResult(False, math.inf, math.inf, panels)
