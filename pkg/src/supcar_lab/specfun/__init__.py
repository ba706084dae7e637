"""Self-contained special-function kernel.

Modified Bessel K of real order, gamma / log-gamma, upper and lower
incomplete gamma, the exponential integral E1, and the Gauss
hypergeometric 2F1 on the parameter ranges the field analytics needs.
Every routine reports an internal error estimate through its
``*_result`` variant.
"""

from ._common import (
    SpecFunResult,
    SpecFunDomainError,
    SpecFunConvergenceError,
    SpecFunPoleError,
)
from ._gamma import gamma_fn, gamma_fn_result, log_gamma, reciprocal_gamma
from ._incgamma import (
    incomplete_gamma_upper,
    incomplete_gamma_upper_result,
    incomplete_gamma_lower,
    incomplete_gamma_lower_result,
    regularized_gamma_p,
    regularized_gamma_q,
    expint_e1,
)
from ._bessel import bessel_k, bessel_k_result
from ._hyp2f1 import hyp2f1, hyp2f1_result

__all__ = [
    "SpecFunResult",
    "SpecFunDomainError",
    "SpecFunConvergenceError",
    "SpecFunPoleError",
    "gamma_fn",
    "gamma_fn_result",
    "log_gamma",
    "reciprocal_gamma",
    "incomplete_gamma_upper",
    "incomplete_gamma_upper_result",
    "incomplete_gamma_lower",
    "incomplete_gamma_lower_result",
    "regularized_gamma_p",
    "regularized_gamma_q",
    "expint_e1",
    "bessel_k",
    "bessel_k_result",
    "hyp2f1",
    "hyp2f1_result",
]
