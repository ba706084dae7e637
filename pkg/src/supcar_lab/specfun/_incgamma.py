"""Incomplete gamma functions and the exponential integral E1.

Series evaluation below the x = a + 1 crossover, modified Lentz
continued fraction above it; both sides carry their own truncation
estimate.  Unregularized values are scaled as x^a e^(-x) in log space
so large-a / small-x corners do not underflow through the regularized
form.
"""

from __future__ import annotations

import math

from ._common import (
    EPS,
    SpecFunConvergenceError,
    SpecFunDomainError,
    SpecFunResult,
    require_finite,
)

_MAXIT = 10_000
_FPMIN = 1e-300


def _lower_series(a: float, x: float) -> tuple[float, float]:
    """(S, rel_err) with gamma(a, x) = x^a e^(-x) S, valid for x < a + 1."""
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAXIT):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * EPS:
            return total, abs(term / total) + 4.0 * EPS
    raise SpecFunConvergenceError(f"lower incomplete gamma series stalled at a={a}, x={x}")


def _upper_contfrac(a: float, x: float) -> tuple[float, float]:
    """(H, rel_err) with Gamma(a, x) = x^a e^(-x) H, valid for x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    rel = math.inf
    for i in range(1, _MAXIT + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        rel = abs(delta - 1.0)
        if rel < EPS:
            return h, rel + 8.0 * EPS
    raise SpecFunConvergenceError(f"upper incomplete gamma fraction stalled at a={a}, x={x}")


def _scaled(a: float, x: float, series: float, rel: float) -> tuple[float, float]:
    """series * x^a e^(-x) with overflow to +inf instead of OverflowError."""
    log_scale = a * math.log(x) - x
    log_val = log_scale + math.log(series)
    if log_val > 709.0:
        return math.inf, math.inf
    val = series * math.exp(log_scale)
    return val, abs(val) * rel


def _check_args(name: str, a: float, x: float) -> tuple[float, float]:
    a = require_finite("a", a)
    x = require_finite("x", x)
    if a <= 0.0:
        raise SpecFunDomainError(f"{name} requires a > 0")
    if x < 0.0:
        raise SpecFunDomainError(f"{name} requires x >= 0")
    return a, x


def incomplete_gamma_upper_result(a: float, x: float) -> SpecFunResult:
    a, x = _check_args("incomplete_gamma_upper", a, x)
    gam = math.exp(math.lgamma(a)) if math.lgamma(a) < 709.0 else math.inf
    if x == 0.0:
        return SpecFunResult(gam, 4.0 * EPS * gam if math.isfinite(gam) else math.inf)
    if x < a + 1.0:
        s, rel = _lower_series(a, x)
        low, lerr = _scaled(a, x, s, rel)
        val = gam - low
        return SpecFunResult(val, lerr + 4.0 * EPS * abs(val))
    h, rel = _upper_contfrac(a, x)
    val, err = _scaled(a, x, h, rel)
    return SpecFunResult(val, err)


def incomplete_gamma_upper(a: float, x: float) -> float:
    """Gamma(a, x) = integral_x^inf t^(a-1) e^(-t) dt, a > 0, x >= 0."""
    return incomplete_gamma_upper_result(a, x).value


def incomplete_gamma_lower_result(a: float, x: float) -> SpecFunResult:
    a, x = _check_args("incomplete_gamma_lower", a, x)
    if x == 0.0:
        return SpecFunResult(0.0, 0.0)
    if x < a + 1.0:
        s, rel = _lower_series(a, x)
        val, err = _scaled(a, x, s, rel)
        return SpecFunResult(val, err)
    gam = math.exp(math.lgamma(a)) if math.lgamma(a) < 709.0 else math.inf
    h, rel = _upper_contfrac(a, x)
    up, uerr = _scaled(a, x, h, rel)
    val = gam - up
    return SpecFunResult(val, uerr + 4.0 * EPS * abs(val))


def incomplete_gamma_lower(a: float, x: float) -> float:
    """gamma(a, x) = integral_0^x t^(a-1) e^(-t) dt, a > 0, x >= 0."""
    return incomplete_gamma_lower_result(a, x).value


def regularized_gamma_p(a: float, x: float) -> float:
    """P(a, x) = lower_incomplete(a, x) / Gamma(a)."""
    a, x = _check_args("regularized_gamma_p", a, x)
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        s, _ = _lower_series(a, x)
        log_val = a * math.log(x) - x - math.lgamma(a) + math.log(s)
        return math.exp(log_val) if log_val > -745.0 else 0.0
    h, _ = _upper_contfrac(a, x)
    log_q = a * math.log(x) - x - math.lgamma(a) + math.log(h)
    return 1.0 - (math.exp(log_q) if log_q > -745.0 else 0.0)


def regularized_gamma_q(a: float, x: float) -> float:
    """Q(a, x) = upper_incomplete(a, x) / Gamma(a)."""
    a, x = _check_args("regularized_gamma_q", a, x)
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        s, _ = _lower_series(a, x)
        log_p = a * math.log(x) - x - math.lgamma(a) + math.log(s)
        return 1.0 - (math.exp(log_p) if log_p > -745.0 else 0.0)
    h, _ = _upper_contfrac(a, x)
    log_q = a * math.log(x) - x - math.lgamma(a) + math.log(h)
    return math.exp(log_q) if log_q > -745.0 else 0.0


_EULER = 0.5772156649015329


def expint_e1(x: float) -> float:
    """E1(x) = Gamma(0, x) for x > 0; series below 1, Lentz fraction above."""
    x = require_finite("x", x)
    if x <= 0.0:
        raise SpecFunDomainError("expint_e1 requires x > 0")
    if x <= 1.0:
        total = -_EULER - math.log(x)
        term = 1.0
        for k in range(1, _MAXIT):
            term *= -x / k
            contrib = -term / k
            total += contrib
            if abs(contrib) < abs(total) * EPS + 1e-300:
                return total
        raise SpecFunConvergenceError(f"E1 series stalled at x={x}")
    # continued fraction E1(x) = e^(-x) / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
    b = x + 1.0
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAXIT):
        a = -i * i
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h * math.exp(-x)
    raise SpecFunConvergenceError(f"E1 continued fraction stalled at x={x}")
