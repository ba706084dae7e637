"""Gamma, log-gamma and the reciprocal gamma used by the other kernels."""

from __future__ import annotations

import math

from ._common import (
    EPS,
    SpecFunDomainError,
    SpecFunPoleError,
    SpecFunResult,
    is_nonpositive_integer,
    require_finite,
)

# Largest x with Gamma(x) < DBL_MAX.
GAMMA_OVERFLOW_X = 171.624376956302725


def gamma_fn(x: float) -> float:
    """Gamma(x) for real x that is not a non-positive integer.

    Returns +inf past the double-precision overflow threshold.
    """
    x = require_finite("x", x)
    if is_nonpositive_integer(x):
        raise SpecFunPoleError(f"gamma_fn has a pole at x={x}")
    if x > GAMMA_OVERFLOW_X:
        return math.inf
    return math.gamma(x)


def gamma_fn_result(x: float) -> SpecFunResult:
    v = gamma_fn(x)
    if math.isinf(v):
        return SpecFunResult(v, math.inf)
    return SpecFunResult(v, 4.0 * EPS * abs(v))


def log_gamma(x: float) -> float:
    """log |Gamma(x)|; poles are rejected as for :func:`gamma_fn`."""
    x = require_finite("x", x)
    if is_nonpositive_integer(x):
        raise SpecFunPoleError(f"log_gamma has a pole at x={x}")
    return math.lgamma(x)


def reciprocal_gamma(x: float) -> float:
    """1/Gamma(x); zero (not an error) at the poles of Gamma."""
    x = require_finite("x", x)
    if is_nonpositive_integer(x):
        return 0.0
    if x > GAMMA_OVERFLOW_X:
        return 0.0
    return 1.0 / math.gamma(x)


# Leading coefficients of 1/Gamma(1+x) = sum c_k x^(k-1); enough terms for
# |x| < 0.01 at double precision.  The even/odd splits below feed Temme's
# Bessel-K series through the cancellation-free combinations
#   gam1(mu) = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
#   gam2(mu) = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2.
_INV_GAMMA_C = (
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
)


def temme_gam1_gam2(mu: float) -> tuple[float, float, float, float]:
    """(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2."""
    if abs(mu) > 0.5 + 1e-12:
        raise SpecFunDomainError("temme_gam1_gam2 requires |mu| <= 1/2")
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    if abs(mu) >= 0.01:
        gam1 = (gammi - gampl) / (2.0 * mu)
    else:
        c = _INV_GAMMA_C
        mu2 = mu * mu
        gam1 = -(c[1] + mu2 * (c[3] + mu2 * (c[5] + mu2 * c[7])))
    gam2 = 0.5 * (gammi + gampl)
    return gam1, gam2, gampl, gammi
