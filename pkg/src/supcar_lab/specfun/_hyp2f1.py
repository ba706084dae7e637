"""Gauss hypergeometric 2F1 for real parameters and real argument z <= 1.

Branch plan: terminating series whenever a or b is a non-positive
integer; otherwise direct series on |z| <= 0.9, the Pfaff map
z -> z/(z-1) on (-2, -0.5), the 1/(1-z) connection formula for z <= -2,
and the 1-z connection formula on (0.9, 1).  Degenerate integer
parameter differences in the connection formulas are reported, not
regularized.
"""

from __future__ import annotations

from ._common import (
    EPS,
    SpecFunConvergenceError,
    SpecFunDomainError,
    SpecFunPoleError,
    SpecFunResult,
    is_nonpositive_integer,
    require_finite,
)
from ._gamma import gamma_fn, reciprocal_gamma

_MAXTERMS = 200_000


def _is_integer(x: float, tol: float = 1e-12) -> bool:
    return abs(x - round(x)) <= tol * max(1.0, abs(x))


def _series(a: float, b: float, c: float, z: float) -> tuple[float, float]:
    """Direct power series with cancellation-aware error estimate."""
    term = 1.0
    total = 1.0
    peak = 1.0
    if z == 0.0:
        return 1.0, EPS
    for k in range(_MAXTERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        peak = max(peak, abs(term))
        if term == 0.0:  # terminating (polynomial) case
            break
        if abs(term) < (abs(total) + peak * EPS) * EPS and k > 2:
            break
    else:
        raise SpecFunConvergenceError(
            f"2F1 series did not converge for a={a}, b={b}, c={c}, z={z}"
        )
    err = abs(term) + peak * 4.0 * EPS
    return total, err


def _gauss_value(a: float, b: float, c: float) -> tuple[float, float]:
    """2F1(a, b; c; 1) = Gamma(c)Gamma(c-a-b) / (Gamma(c-a)Gamma(c-b))."""
    s = c - a - b
    if s <= 0.0:
        raise SpecFunDomainError(
            f"2F1 at z=1 requires c-a-b > 0, got c-a-b={s}"
        )
    val = gamma_fn(c) * gamma_fn(s) * reciprocal_gamma(c - a) * reciprocal_gamma(c - b)
    return val, 8.0 * EPS * abs(val)


def _linear_1mz(a: float, b: float, c: float, z: float) -> tuple[float, float]:
    """Connection formula in w = 1 - z for z near 1 (A&S 15.3.6)."""
    s = c - a - b
    if _is_integer(s):
        raise SpecFunConvergenceError(
            f"degenerate 1-z connection: c-a-b={s} is an integer (a={a}, b={b}, c={c})"
        )
    w = 1.0 - z
    f1, e1 = _series(a, b, a + b - c + 1.0, w)
    f2, e2 = _series(c - a, c - b, s + 1.0, w)
    g1 = gamma_fn(c) * gamma_fn(s) * reciprocal_gamma(c - a) * reciprocal_gamma(c - b)
    g2 = gamma_fn(c) * gamma_fn(-s) * reciprocal_gamma(a) * reciprocal_gamma(b)
    t1 = g1 * f1
    t2 = g2 * (w ** s) * f2
    val = t1 + t2
    err = abs(g1) * e1 + abs(g2) * (w ** s) * e2 + 4.0 * EPS * (abs(t1) + abs(t2))
    return val, err


def _linear_recip_1mz(a: float, b: float, c: float, z: float) -> tuple[float, float]:
    """Connection formula in w = 1/(1-z) for large negative z (A&S 15.3.8)."""
    if _is_integer(a - b):
        raise SpecFunConvergenceError(
            f"degenerate 1/(1-z) connection: a-b={a - b} is an integer (a={a}, b={b}, c={c})"
        )
    w = 1.0 / (1.0 - z)
    f1, e1 = _series(a, c - b, a - b + 1.0, w)
    f2, e2 = _series(b, c - a, b - a + 1.0, w)
    g1 = gamma_fn(c) * gamma_fn(b - a) * reciprocal_gamma(b) * reciprocal_gamma(c - a)
    g2 = gamma_fn(c) * gamma_fn(a - b) * reciprocal_gamma(a) * reciprocal_gamma(c - b)
    t1 = g1 * (w ** a) * f1
    t2 = g2 * (w ** b) * f2
    val = t1 + t2
    err = abs(g1) * (w ** a) * e1 + abs(g2) * (w ** b) * e2 + 4.0 * EPS * (abs(t1) + abs(t2))
    return val, err


def _pfaff(a: float, b: float, c: float, z: float) -> tuple[float, float]:
    """Pfaff map 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1))."""
    w = z / (z - 1.0)
    f, e = _series(a, c - b, c, w)
    pref = (1.0 - z) ** (-a)
    return pref * f, pref * e + 4.0 * EPS * abs(pref * f)


def hyp2f1_result(a: float, b: float, c: float, z: float) -> SpecFunResult:
    a = require_finite("a", a)
    b = require_finite("b", b)
    c = require_finite("c", c)
    z = require_finite("z", z)
    if is_nonpositive_integer(c):
        raise SpecFunPoleError(f"2F1 undefined: c={c} is a non-positive integer")
    if z > 1.0:
        raise SpecFunDomainError(f"2F1 requires z <= 1, got z={z}")

    if is_nonpositive_integer(a) or is_nonpositive_integer(b):
        val, err = _series(a, b, c, z)  # terminating polynomial
    elif z == 1.0:
        val, err = _gauss_value(a, b, c)
    elif z <= -2.0:
        if _is_integer(a - b):
            # the 1/(1-z) connection degenerates; the Pfaff map is exact
            # but its series slows toward z -> -inf, so cap the reach
            if z < -999.0:
                raise SpecFunConvergenceError(
                    f"degenerate 1/(1-z) connection (a-b={a - b} integer) "
                    f"with z={z} beyond the Pfaff series range"
                )
            val, err = _pfaff(a, b, c, z)
        else:
            val, err = _linear_recip_1mz(a, b, c, z)
    elif z < -0.5:
        val, err = _pfaff(a, b, c, z)
    elif z <= 0.9:
        val, err = _series(a, b, c, z)
    else:
        val, err = _linear_1mz(a, b, c, z)
    return SpecFunResult(val, err)


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """2F1(a, b; c; z) for real z <= 1 (z = 1 needs c - a - b > 0)."""
    return hyp2f1_result(a, b, c, z).value
