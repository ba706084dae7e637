"""Mixing measures on the positive half-line.

The superposition measure pi drives the dependence structure of the
field: its density, regular-variation data, negative moments, sampler,
quantile binning for simulation, and the de Bruijn conjugate entering
the heavy-tail normalizer.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from ._quad import integrate_halfline, quad


@dataclass(frozen=True)
class SlowlyVarying:
    """l(x) = C or C * (1 + ln(1 + x))^k; slowly varying, positive."""

    kind: str  # "constant" | "log_power"
    C: float = 1.0
    k: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "log_power"):
            raise ValueError(f"unknown slowly varying kind {self.kind!r}")
        if self.C <= 0.0:
            raise ValueError("C must be > 0")
        if self.kind == "log_power" and self.k < 1:
            raise ValueError("log_power requires integer k >= 1")

    def value(self, x: float) -> float:
        if self.kind == "constant":
            return self.C
        return self.C * (1.0 + math.log1p(x)) ** self.k


@dataclass(frozen=True)
class GammaMix:
    """Gamma(H, 1) mixing measure; regular variation exponent alpha = H."""

    H: float

    def __post_init__(self) -> None:
        if self.H <= 0.0:
            raise ValueError("H must be > 0")

    @property
    def alpha(self) -> float:
        return self.H


@dataclass(frozen=True)
class RegVar:
    """Density proportional to l(1/lam) lam^(alpha-1) on (0, lambda_max].

    Carries an explicit upper cutoff with exact normalization; the
    normalization constant is absorbed into the slowly varying part, so
    the density equals l_eff(1/lam) lam^(alpha-1) with l_eff = norm * l.
    """

    alpha: float
    sv: SlowlyVarying
    lambda_max: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha <= 0.0:
            raise ValueError("alpha must be > 0")
        if self.lambda_max <= 0.0:
            raise ValueError("lambda_max must be > 0")


@dataclass(frozen=True)
class PointMass:
    """Degenerate mixing measure at a single rate; the superposition then
    collapses to one single-rate field.  No regular-variation data."""

    lam0: float

    def __post_init__(self) -> None:
        if self.lam0 <= 0.0:
            raise ValueError("lam0 must be > 0")


MixingMeasure = GammaMix | RegVar | PointMass


@functools.lru_cache(maxsize=None)
def _regvar_norm(m: RegVar) -> float:
    """1 / integral_0^lambda_max l(1/lam) lam^(alpha-1) d lam."""
    if m.sv.kind == "constant":
        return m.alpha / (m.sv.C * m.lambda_max**m.alpha)
    val, _ = integrate_halfline(
        lambda lam: m.sv.value(1.0 / lam) * lam ** (m.alpha - 1.0), upper=m.lambda_max
    )
    return 1.0 / val


def density(m: MixingMeasure, lam: float) -> float:
    """Probability density p(lam) of the mixing measure at lam > 0."""
    if lam <= 0.0:
        raise ValueError("lam must be > 0")
    if isinstance(m, PointMass):
        raise ValueError("point mass has no density")
    if isinstance(m, GammaMix):
        logp = (m.H - 1.0) * math.log(lam) - lam - math.lgamma(m.H)
        return math.exp(logp) if logp > -745.0 else 0.0
    if lam > m.lambda_max:
        return 0.0
    return _regvar_norm(m) * m.sv.value(1.0 / lam) * lam ** (m.alpha - 1.0)


def log_density(m: MixingMeasure, lam: float) -> float:
    """ln p(lam); -inf where the density vanishes.  Safe at extreme lam."""
    if lam <= 0.0:
        raise ValueError("lam must be > 0")
    if isinstance(m, PointMass):
        raise ValueError("point mass has no density")
    if isinstance(m, GammaMix):
        return (m.H - 1.0) * math.log(lam) - lam - math.lgamma(m.H)
    if lam > m.lambda_max:
        return -math.inf
    return (
        math.log(_regvar_norm(m))
        + math.log(m.sv.value(1.0 / lam))
        + (m.alpha - 1.0) * math.log(lam)
    )


def sv_value(m: MixingMeasure, x: float) -> float:
    """The slowly varying part l(x) with p(lam) = l(1/lam) lam^(alpha-1).

    This is the exact l entering the limit-theorem normalizers; for the
    Gamma measure l(x) = e^(-1/x) / Gamma(H) -> 1/Gamma(H).
    """
    if x <= 0.0:
        raise ValueError("x must be > 0")
    if isinstance(m, PointMass):
        raise ValueError("point mass has no regular-variation data")
    if isinstance(m, GammaMix):
        return math.exp(-1.0 / x) / math.gamma(m.H)
    return _regvar_norm(m) * m.sv.value(x)


def cdf(m: MixingMeasure, lam: float) -> float:
    if lam <= 0.0:
        return 0.0
    if isinstance(m, PointMass):
        return 1.0 if lam >= m.lam0 else 0.0
    if isinstance(m, GammaMix):
        return specfun.regularized_gamma_p(m.H, lam)
    if lam >= m.lambda_max:
        return 1.0
    if m.sv.kind == "constant":
        return (lam / m.lambda_max) ** m.alpha
    val, _ = integrate_halfline(lambda t: density(m, t), upper=lam)
    return min(val, 1.0)


def quantile(m: MixingMeasure, p: float) -> float:
    """Inverse CDF by closed form where available, else bisection."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    if isinstance(m, PointMass):
        return m.lam0
    if isinstance(m, RegVar) and m.sv.kind == "constant":
        return m.lambda_max * p ** (1.0 / m.alpha)
    lo, hi = 1e-12, (m.lambda_max if isinstance(m, RegVar) else max(4.0 * m.H, 50.0))
    while cdf(m, hi) < p:
        hi *= 2.0
        if hi > 1e12:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(m, mid) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def neg_moment(m: MixingMeasure, k: float) -> float:
    """integral lam^(-k) pi(d lam); +inf when the origin mass diverges."""
    if k <= 0.0:
        raise ValueError("k must be > 0")
    if isinstance(m, PointMass):
        return m.lam0 ** (-k)
    if isinstance(m, GammaMix):
        if m.H <= k:
            return math.inf
        return math.gamma(m.H - k) / math.gamma(m.H)
    if m.alpha <= k:
        return math.inf
    if m.sv.kind == "constant":
        return m.alpha / ((m.alpha - k) * m.lambda_max**k)
    val, _ = integrate_halfline(
        lambda lam: density(m, lam) * lam ** (-k), upper=m.lambda_max
    )
    return val


def integrate(
    m: MixingMeasure, g, *, lower: float = 0.0, epsrel: float = 1e-10
) -> tuple[float, float]:
    """(value, err) of integral g(lam) pi(d lam) over (lower, support end)."""
    if isinstance(m, PointMass):
        val = g(m.lam0) if m.lam0 > lower else 0.0
        return val, 0.0
    upper = m.lambda_max if isinstance(m, RegVar) else math.inf

    def f(lam: float) -> float:
        if lam <= lower:
            return 0.0
        dens = density(m, lam)
        if dens == 0.0:
            return 0.0  # never evaluate g where pi carries no mass
        return g(lam) * dens

    return integrate_halfline(f, lower=lower, upper=upper, epsrel=epsrel)


def neg_moment_truncated(m: MixingMeasure, k: float, lo: float) -> float:
    """integral_lo^inf lam^(-k) pi(d lam); finite for every lo > 0."""
    if lo <= 0.0:
        return neg_moment(m, k)
    if isinstance(m, PointMass):
        return m.lam0 ** (-k) if m.lam0 > lo else 0.0
    if isinstance(m, GammaMix) and m.H > k:
        return (
            math.gamma(m.H - k)
            / math.gamma(m.H)
            * specfun.regularized_gamma_q(m.H - k, lo)
        )
    if isinstance(m, RegVar) and m.sv.kind == "constant" and m.alpha != k:
        bb = m.lambda_max
        return (
            m.alpha
            / bb**m.alpha
            * (bb ** (m.alpha - k) - min(lo, bb) ** (m.alpha - k))
            / (m.alpha - k)
        )
    val, _ = integrate(m, lambda lam: lam ** (-k), lower=lo)
    return val


def sample(m: MixingMeasure, rng: np.random.Generator, size: int | None = None):
    """Draw from pi with the caller-owned generator."""
    if isinstance(m, PointMass):
        return np.full(size, m.lam0) if size is not None else m.lam0
    if isinstance(m, GammaMix):
        return rng.gamma(m.H, 1.0, size=size)
    if m.sv.kind == "constant":
        u = rng.random(size)
        return m.lambda_max * u ** (1.0 / m.alpha)
    u = rng.random(size)
    grid = _regvar_quantile_grid(m)
    return np.interp(u, grid[0], grid[1])


@functools.lru_cache(maxsize=None)
def _regvar_quantile_grid(m: RegVar, n: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    lams = np.geomspace(m.lambda_max * 1e-9, m.lambda_max, n)
    cdfs = np.array([cdf(m, float(x)) for x in lams])
    cdfs[0], cdfs[-1] = 0.0, 1.0
    cdfs = np.maximum.accumulate(cdfs)
    return cdfs, lams


def _conditional_mean(m: MixingMeasure, a: float, b: float, prob: float) -> float:
    """E[lam ; a < lam <= b] / prob, by incomplete-gamma algebra or quadrature."""
    if isinstance(m, PointMass):
        return m.lam0
    if isinstance(m, GammaMix):
        pa = specfun.regularized_gamma_p(m.H + 1.0, a) if a > 0 else 0.0
        pb = specfun.regularized_gamma_p(m.H + 1.0, b) if math.isfinite(b) else 1.0
        return m.H * (pb - pa) / prob
    if m.sv.kind == "constant":
        bb = min(b, m.lambda_max)
        num = (
            _regvar_norm(m)
            * m.sv.C
            * (bb ** (m.alpha + 1.0) - a ** (m.alpha + 1.0))
            / (m.alpha + 1.0)
        )
        return num / prob
    bb = min(b, m.lambda_max) if math.isfinite(b) else m.lambda_max
    val, _ = quad(lambda t: t * density(m, t), a, bb)
    return val / prob


def quantile_bins(
    m: MixingMeasure, n_bins: int, lambda_min: float
) -> tuple[list[tuple[float, float]], float]:
    """Equal-conditional-probability bins of pi restricted above lambda_min.

    Returns ([(lam_j, p_j)], truncated_mass): lam_j is the conditional
    mean of bin j, sum p_j = pi((lambda_min, inf)), and the truncated
    mass below lambda_min is reported as a bias diagnostic.
    """
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    if lambda_min < 0.0:
        raise ValueError("lambda_min must be >= 0")
    f_min = cdf(m, lambda_min) if lambda_min > 0.0 else 0.0
    tail = 1.0 - f_min
    if tail <= 0.0:
        raise ValueError("lambda_min truncates the entire mixing measure")
    p_each = tail / n_bins
    edges = [lambda_min if lambda_min > 0.0 else 0.0]
    for j in range(1, n_bins):
        edges.append(quantile(m, f_min + tail * j / n_bins))
    edges.append(math.inf)
    bins = []
    for j in range(n_bins):
        lam_j = _conditional_mean(m, edges[j], edges[j + 1], p_each)
        bins.append((lam_j, p_each))
    return bins, f_min


def log_bins(
    m: MixingMeasure, n_bins: int, lambda_min: float
) -> tuple[list[tuple[float, float]], float]:
    """Geometrically spaced bins of pi restricted above lambda_min.

    Same output contract as :func:`quantile_bins` (conditional-mean
    representatives, masses summing to the truncated tail), but the bin
    edges resolve the small-lam region uniformly in log lam, which the
    negative-moment-dominated functionals need.
    """
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    if lambda_min <= 0.0:
        raise ValueError("log_bins requires lambda_min > 0")
    if isinstance(m, PointMass):
        return quantile_bins(m, n_bins, lambda_min)
    f_min = cdf(m, lambda_min)
    tail = 1.0 - f_min
    if tail <= 0.0:
        raise ValueError("lambda_min truncates the entire mixing measure")
    if isinstance(m, RegVar):
        lam_hi = m.lambda_max
        open_top = False
    else:
        lam_hi = quantile(m, 1.0 - min(1e-7, tail * 1e-4))
        open_top = True
    n_geo = n_bins - 1 if open_top else n_bins
    if n_geo < 1 or lam_hi <= lambda_min:
        return quantile_bins(m, n_bins, lambda_min)
    edges = list(np.geomspace(lambda_min, lam_hi, n_geo + 1))
    if open_top:
        edges.append(math.inf)
    cdfs = [f_min] + [cdf(m, e) if math.isfinite(e) else 1.0 for e in edges[1:]]
    bins = []
    for j in range(len(edges) - 1):
        p_j = cdfs[j + 1] - cdfs[j]
        if p_j <= 1e-15 * tail:
            continue
        lam_j = _conditional_mean(m, edges[j], edges[j + 1], p_j)
        bins.append((lam_j, p_j))
    # make the masses sum exactly to the truncated tail
    total = sum(p for _, p in bins)
    bins = [(l, p * tail / total) for l, p in bins]
    return bins, f_min


def debruijn_conjugate_at(m: MixingMeasure, d: int, T: float) -> float:
    """l#(T): de Bruijn conjugate of x -> (l(x^(d/alpha)))^(-1/d) at T.

    The fixed point z = T / g(z) gives an exact solution of the
    defining relation h(T) g(T h(T)) = 1 with h(T) = z* / T.
    """
    if T <= 1.0:
        raise ValueError("T must be > 1")
    alpha = m.alpha if isinstance(m, RegVar) else m.H

    def g(x: float) -> float:
        return sv_value(m, x ** (d / alpha)) ** (-1.0 / d)

    if isinstance(m, RegVar) and m.sv.kind == "constant":
        c_eff = _regvar_norm(m) * m.sv.C
        return c_eff ** (1.0 / d)
    z = T
    for _ in range(200):
        z_new = T / g(z)
        if abs(z_new - z) <= 1e-10 * abs(z_new):
            return z_new / T
        z = z_new
    raise RuntimeError(f"de Bruijn fixed point did not converge at T={T}")
