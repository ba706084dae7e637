"""Shared result type and exceptions for the special-function kernel."""

from __future__ import annotations

import math
from dataclasses import dataclass


class SpecFunDomainError(ValueError):
    """Argument outside the supported domain (x <= 0, non-finite input, ...)."""


class SpecFunPoleError(SpecFunDomainError):
    """Evaluation requested exactly at a pole of the function."""


class SpecFunConvergenceError(RuntimeError):
    """An internal series or continued fraction failed to converge."""


@dataclass(frozen=True)
class SpecFunResult:
    """Function value together with the algorithm's own error bound.

    ``est_abs_error`` is an upper bound from the internal error model
    (series remainder, continued-fraction increment, or rounding
    accumulation); it is never negative.  ``underflow`` marks values
    rounded to zero because the true result is below the smallest
    representable magnitude.
    """

    value: float
    est_abs_error: float
    underflow: bool = False

    def __post_init__(self) -> None:
        if self.est_abs_error < 0.0:
            raise ValueError("est_abs_error must be >= 0")


def require_finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise SpecFunDomainError(f"{name} must be finite, got {x!r}")
    return x


def is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


EPS = 2.220446049250313e-16
TINY = 5e-324
