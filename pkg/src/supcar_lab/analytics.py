"""Exact covariance, spectral, cumulant and limit-constant analytics.

Everything here is deterministic: closed forms where the mixing measure
admits them, adaptive quadrature on the transformed half-line otherwise.
Divergent quantities come back as +inf rather than raising, so regime
classification can reason about them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import levy, mixing, specfun
from ._quad import adaptive_complex, integrate_halfline, quad
from .levy import CharacteristicQuadruple
from .windows import WindowSpec


def const_c1(d: int) -> float:
    """Kernel Fourier constant; negative for every d >= 1."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d % 2 == 1:
        return -(2.0 ** (d / 2.0 - 1.0)) * math.gamma((d + 1.0) / 2.0) / math.sqrt(math.pi)
    return -(2.0 ** (-d / 2.0)) * math.gamma(float(d)) / math.gamma(d / 2.0)


def const_c2(d: int) -> float:
    c1 = const_c1(d)
    return c1 * c1 * (math.pi / 2.0) ** (d / 2.0) / math.gamma(d + 1.0)


def car_variance(lam: float, sigma2: float, d: int) -> float:
    """Single-kernel field variance: the small-argument Bessel limit of
    the Matern covariance, equal to sigma^2 * integral g_lam^2."""
    # x^nu K_nu(x) -> 2^(nu-1) Gamma(nu) as x -> 0
    nu = d / 2.0 + 1.0
    limit = 2.0 ** (nu - 1.0) * math.gamma(nu)
    return const_c1(d) ** 2 * sigma2 * (math.pi / 2.0) ** (d / 2.0) * limit / (
        lam ** (d + 2.0) * math.gamma(d + 1.0)
    )


def car_covariance(t_norm: float, lam: float, sigma2: float, d: int) -> float:
    """Matern covariance of the single-rate field at lag ||t||."""
    if lam <= 0.0:
        raise ValueError("lam must be > 0")
    if t_norm < 0.0:
        raise ValueError("t_norm must be >= 0")
    if t_norm == 0.0:
        return car_variance(lam, sigma2, d)
    x = lam * t_norm
    nu = d / 2.0 + 1.0
    return (
        const_c1(d) ** 2
        * sigma2
        * (math.pi / 2.0) ** (d / 2.0)
        * x**nu
        * specfun.bessel_k(nu, x)
        / (lam ** (d + 2.0) * math.gamma(d + 1.0))
    )


def car_spectral(omega_norm: float, lam: float, sigma2: float, d: int) -> float:
    if lam <= 0.0:
        raise ValueError("lam must be > 0")
    return const_c1(d) ** 2 * sigma2 / (omega_norm**2 + lam**2) ** (d + 1.0)


def supcar_moments(q: CharacteristicQuadruple) -> tuple[float, float]:
    """(mean, variance) of the superposed field.

    The mean is 0 by the centering invariant.  The variance constant is
    pi^(d/2) Gamma(d) / (2^(d+1) Gamma(d/2)): the direct evaluation of
    -K''(0) integral (2 lam)^(-2) e^(-2 lam ||u||) du pi(d lam), which the
    single-rate Matern variance, the spectral integral, and kernel
    self-convolution all confirm.
    """
    d = q.d
    m = mixing.neg_moment(q.mix, d + 2.0)
    if math.isinf(m):
        return 0.0, math.inf
    const = math.pi ** (d / 2.0) * math.gamma(float(d)) / (
        2.0 ** (d + 1.0) * math.gamma(d / 2.0)
    )
    return 0.0, const * levy.base_variance(q) * m


def supcar_variance_truncated(q: CharacteristicQuadruple, lambda_min: float) -> float:
    """Field variance with the mixing measure restricted to lam > lambda_min."""
    d = q.d
    m = mixing.neg_moment_truncated(q.mix, d + 2.0, lambda_min)
    const = math.pi ** (d / 2.0) * math.gamma(float(d)) / (
        2.0 ** (d + 1.0) * math.gamma(d / 2.0)
    )
    return const * levy.base_variance(q) * m


def supcar_covariance(
    t_norm: float, q: CharacteristicQuadruple, *, lambda_min: float = 0.0
) -> float:
    """Covariance r(||t||) of the superposed field by lam-quadrature.

    +inf when the mixing measure's (d+2) negative moment diverges.  With
    ``lambda_min`` > 0 the superposition is restricted to lam > lambda_min
    (the simulator's truncated model).
    """
    if t_norm < 0.0:
        raise ValueError("t_norm must be >= 0")
    d = q.d
    if t_norm == 0.0:
        if lambda_min > 0.0:
            return supcar_variance_truncated(q, lambda_min)
        return supcar_moments(q)[1]
    if lambda_min == 0.0 and math.isinf(mixing.neg_moment(q.mix, d + 2.0)):
        return math.inf
    nu = d / 2.0 + 1.0

    def g(lam: float) -> float:
        return lam ** (-nu) * specfun.bessel_k(nu, lam * t_norm)

    val, _ = mixing.integrate(q.mix, g, lower=lambda_min, epsrel=1e-9)
    return const_c2(d) * levy.base_variance(q) * t_norm**nu * val


def supcar_covariance_with_error(
    t_norm: float, q: CharacteristicQuadruple, *, lambda_min: float = 0.0
) -> tuple[float, float]:
    """Covariance together with the quadrature error estimate."""
    d = q.d
    if t_norm == 0.0:
        val = (
            supcar_variance_truncated(q, lambda_min)
            if lambda_min > 0.0
            else supcar_moments(q)[1]
        )
        return val, abs(val) * 1e-12 if math.isfinite(val) else math.inf
    if lambda_min == 0.0 and math.isinf(mixing.neg_moment(q.mix, d + 2.0)):
        return math.inf, math.inf
    nu = d / 2.0 + 1.0
    val, err = mixing.integrate(
        q.mix,
        lambda lam: lam ** (-nu) * specfun.bessel_k(nu, lam * t_norm),
        lower=lambda_min,
        epsrel=1e-9,
    )
    scale = const_c2(d) * levy.base_variance(q) * t_norm**nu
    return scale * val, abs(scale) * err


def supcar_spectral_with_error(
    omega_norm: float, q: CharacteristicQuadruple, *, lambda_min: float = 0.0
) -> tuple[float, float]:
    """Spectral density together with the quadrature error estimate."""
    d = q.d
    if omega_norm == 0.0 and lambda_min == 0.0:
        if math.isinf(mixing.neg_moment(q.mix, 2.0 * d + 2.0)):
            return math.inf, math.inf
    val, err = mixing.integrate(
        q.mix,
        lambda lam: (omega_norm**2 + lam * lam) ** (-(d + 1.0)),
        lower=lambda_min,
        epsrel=1e-9,
    )
    scale = const_c1(d) ** 2 * levy.base_variance(q)
    return scale * val, scale * err


def supcar_covariance_gamma_closed(t_norm: float, H: float, d: int, k2: float) -> float:
    """Closed-form covariance for Gamma(H, 1) mixing via the hypergeometric
    representation; requires H > d + 2 and t_norm > 0."""
    if t_norm <= 0.0:
        raise ValueError("t_norm must be > 0")
    if H <= d + 2.0:
        raise ValueError("closed form requires H > d + 2")
    c = H - d / 2.0 - 0.5
    if c <= 0.0 and c == math.floor(c):
        raise specfun.SpecFunPoleError("H - d/2 - 1/2 is a non-positive integer")
    pref = (
        -const_c2(d)
        * math.sqrt(math.pi)
        * k2
        * math.gamma(H - d - 2.0)
        / (2.0 ** (H - d / 2.0 - 1.0) * math.gamma(c))
    )
    f = specfun.hyp2f1((H + 1.0) / 2.0, H / 2.0, c, 1.0 - t_norm * t_norm)
    return pref * t_norm ** (d + 2.0) * f


def supcar_spectral(
    omega_norm: float, q: CharacteristicQuadruple, *, lambda_min: float = 0.0
) -> float:
    """Spectral density f(||omega||) of the superposed field."""
    d = q.d

    def g(lam: float) -> float:
        return (omega_norm**2 + lam * lam) ** (-(d + 1.0))

    if omega_norm == 0.0 and lambda_min == 0.0:
        if math.isinf(mixing.neg_moment(q.mix, 2.0 * d + 2.0)):
            return math.inf
    val, _ = mixing.integrate(q.mix, g, lower=lambda_min, epsrel=1e-9)
    return const_c1(d) ** 2 * levy.base_variance(q) * val


def _complex_over_edges(f, edges: list[float], rel_tol: float) -> complex:
    """Composite complex adaptive integral with magnitude-based tolerance.

    The per-panel tolerance comes from sampled node magnitudes, so panels
    with negligible mass do not get refined against the global target.
    """
    scales = []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes = [a + (b - a) * j / 6.0 for j in range(7)]
        scales.append((b - a) * max(abs(f(u)) for u in nodes))
    total_scale = max(sum(scales), 1e-280)
    tol = total_scale * rel_tol
    out = 0j
    for (a, b), sc in zip(zip(edges[:-1], edges[1:]), scales):
        if sc < 0.002 * tol:
            continue
        out += adaptive_complex(f, a, b, tol=tol / len(scales))
    return out


def _mixing_u_edges(m: mixing.MixingMeasure, pull_left: float = 25.0) -> list[float]:
    """Panel edges in u = ln(lam) covering the mixing measure's support,
    extended to the left for negative-moment-weighted integrands."""
    qs = [1e-12, 1e-6, 1e-3, 0.05, 0.3, 0.7, 0.95, 1.0 - 1e-3, 1.0 - 1e-8]
    pts = sorted({math.log(mixing.quantile(m, p)) for p in qs})
    lo = pts[0] - pull_left
    edges = [lo, pts[0] - 12.0, pts[0] - 5.0] + pts
    if isinstance(m, mixing.RegVar):
        edges.append(math.log(m.lambda_max))
    else:
        edges.append(pts[-1] + 3.0)
    out = sorted(set(edges))
    return out


def marginal_cumulant(q: CharacteristicQuadruple, s: float) -> complex:
    """log-characteristic function of the field marginal: nested complex
    quadrature of K over the kernel profile and the mixing measure,
    relative tolerance 1e-7 on the complex magnitude."""
    d = q.d
    surface = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    if s == 0.0:
        return 0j

    def inner(lam: float) -> complex:
        def f(v: float) -> complex:
            arg = -s * math.exp(-v) / (2.0 * lam)
            k = levy.cumulant(q, arg)
            return k * v ** (d - 1) if d > 1 else k

        val = _complex_over_edges(f, [0.0, 1.0, 3.0, 8.0, 16.0, 30.0, 60.0], 1e-9)
        return val * lam ** (-d)

    def g(u: float) -> complex:
        lam = math.exp(u)
        dens = mixing.density(q.mix, lam)
        if dens == 0.0:
            return 0j
        return inner(lam) * dens * lam

    val = _complex_over_edges(g, _mixing_u_edges(q.mix), 1e-7)
    return surface * val


def joint_cumulant(
    q: CharacteristicQuadruple, s: tuple[float, ...], t: tuple[float, ...]
) -> complex:
    """Joint log-characteristic function at points t (d = 1, k <= 3)."""
    if q.d != 1:
        raise ValueError("joint_cumulant is implemented for d = 1")
    if len(s) != len(t) or not 1 <= len(s) <= 3:
        raise ValueError("need 1 to 3 (s, t) pairs")
    if all(si == 0.0 for si in s):
        return 0j

    def inner(lam: float) -> complex:
        order = sorted(range(len(t)), key=lambda i: t[i])
        pts = [lam * t[i] for i in order]
        ss = [s[i] for i in order]
        s_tot = math.fsum(ss)

        def f(w: float) -> complex:
            # sum s_i e^(-|w - p_i|) cancels catastrophically when the
            # kinks nearly coincide (lam * spread << 1); factor out the
            # nearest kink and use exact regional exponent differences
            # with expm1 so the combination keeps full precision
            dist = [abs(w - p) for p in pts]
            m = min(range(len(pts)), key=dist.__getitem__)
            acc = s_tot
            for i, (si, p) in enumerate(zip(ss, pts)):
                if i == m:
                    continue
                same_side = (w >= p) == (w >= pts[m])
                if same_side:
                    diff = (pts[m] - p) if w >= p else (p - pts[m])
                else:
                    diff = dist[i] - dist[m]
                acc += si * math.expm1(-diff)
            arg = -math.exp(-dist[m]) * acc / (2.0 * lam)
            return levy.cumulant(q, arg)

        # integrand lives within ~45 units of each kernel kink; gaps in
        # between contribute only e^(-gap) and are dropped
        intervals: list[tuple[float, float]] = []
        for p in pts:
            a, b = p - 45.0, p + 45.0
            if intervals and a <= intervals[-1][1]:
                intervals[-1] = (intervals[-1][0], b)
            else:
                intervals.append((a, b))
        total = 0j
        for a, b in intervals:
            edges = sorted({a, b, *[p for p in pts if a < p < b]})
            total += _complex_over_edges(f, edges, 1e-9)
        return total / lam

    def g(u: float) -> complex:
        lam = math.exp(u)
        dens = mixing.density(q.mix, lam)
        if dens == 0.0:
            return 0j
        return inner(lam) * dens * lam

    return _complex_over_edges(g, _mixing_u_edges(q.mix), 1e-7)


def bessel_moment(mu: float, nu: float) -> float:
    """integral_0^inf lam^(mu-1) K_nu(lam) d lam = 2^(mu-2) G((mu-nu)/2) G((mu+nu)/2)."""
    if mu <= nu or nu < 0.0:
        raise ValueError("requires mu > nu >= 0")
    return (
        2.0 ** (mu - 2.0)
        * math.gamma(0.5 * (mu - nu))
        * math.gamma(0.5 * (mu + nu))
    )


def _alpha_of(q: CharacteristicQuadruple) -> float:
    return q.mix.alpha


def asymptotic_constants(q: CharacteristicQuadruple) -> tuple[float, float]:
    """(c3, c4) of the covariance-tail and spectral-origin asymptotics.

    c3 requires alpha > d + 2; c4 is the origin-singularity constant,
    finite for alpha < 2d + 2.  Divergent combinations return +inf.
    """
    d = q.d
    alpha = _alpha_of(q)
    var = levy.base_variance(q)
    nu = d / 2.0 + 1.0
    if alpha <= d + 2.0:
        c3 = math.inf
    else:
        val, _ = integrate_halfline(
            lambda lam: lam ** (alpha - d / 2.0 - 2.0) * specfun.bessel_k(nu, lam)
        )
        c3 = const_c2(d) * var * val
    if alpha >= 2.0 * d + 2.0:
        c4 = math.inf
    else:
        val, _ = integrate_halfline(
            lambda lam: lam ** (alpha - 1.0) * (1.0 + lam * lam) ** (-(d + 1.0))
        )
        c4 = const_c1(d) ** 2 * var * val
    return c3, c4


@dataclass(frozen=True)
class ModelConstants:
    """Every limit-theorem constant, tagged with its (d, window) context.

    Divergent constants are +inf; c6 is 0 when the base law has no
    Gaussian part.
    """

    d: int
    window_volume: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c7: float
    c_plus: float
    c_minus: float


def limit_constants(q: CharacteristicQuadruple, window: WindowSpec) -> ModelConstants:
    d = q.d
    window.validate(d)
    vol = window.volume(d)
    alpha = _alpha_of(q)
    c3, c4 = asymptotic_constants(q)

    m22 = mixing.neg_moment(q.mix, 2.0 * d + 2.0)
    kappa = math.pi ** (d / 2.0) * math.gamma(float(d)) / math.gamma(d / 2.0)
    c5 = 2.0 * vol * kappa**2 * m22 if math.isfinite(m22) else math.inf

    if q.b > 0.0:
        if alpha >= 2.0 * d + 2.0:
            c6 = math.inf  # defined only in the long-range window
        else:
            val, _ = integrate_halfline(
                lambda lam: lam ** (alpha - 1.0) * (1.0 + lam * lam) ** (-(d + 1.0))
            )
            c6 = const_c1(d) ** 2 * q.b * val
    else:
        c6 = 0.0

    expo = (d + 1.0) / alpha
    c7 = kappa * vol**expo / alpha**expo

    gamma_star = alpha / (d + 1.0)
    if q.levy is None:
        c_plus = c_minus = 0.0
    else:
        c_plus = levy.side_moment(q.levy, gamma_star, "plus")
        c_minus = levy.side_moment(q.levy, gamma_star, "minus")

    return ModelConstants(
        d=d,
        window_volume=vol,
        c1=const_c1(d),
        c2=const_c2(d),
        c3=c3,
        c4=c4,
        c5=c5,
        c6=c6,
        c7=c7,
        c_plus=c_plus,
        c_minus=c_minus,
    )


def genbm_variance(t: float, alpha: float, d: int = 1, window: WindowSpec | None = None) -> float:
    """Variance of the generalized-Brownian limit at time t (d = 1).

    integral |y|^(alpha - 2d - 2) |int_{Delta(t^(1/d))} e^(iyx) dx|^2 dy,
    with the interval window's closed sinc form inside the quadrature.
    """
    if d != 1:
        raise ValueError("genbm_variance is implemented for d = 1")
    if not d + 2.0 < alpha < 2.0 * d + 2.0:
        return math.inf
    if t == 0.0:
        return 0.0
    if t < 0.0:
        raise ValueError("t must be >= 0")
    window = window or WindowSpec("cube", 1.0)
    window.validate(d)
    half = 0.5 * window.scale * t  # Delta(t) = [-half, half] for d = 1

    # Var = 8 * int_0^inf y^(alpha-6) sin^2(y * half) dy, split at the sinc knee
    def f(y: float) -> float:
        return y ** (alpha - 6.0) * math.sin(y * half) ** 2

    knee = 1.0 / half
    head, _ = quad(f, 0.0, knee, epsrel=1e-10, epsabs=1e-300)
    body, _ = quad(f, knee, 60.0 * knee, epsrel=1e-10, epsabs=1e-300)
    # beyond the knee, average sin^2 = 1/2 with an oscillatory remainder
    tail_mean = 0.5 * (60.0 * knee) ** (alpha - 5.0) / (5.0 - alpha)
    osc, _ = quad(
        lambda y: -0.5 * y ** (alpha - 6.0) * math.cos(2.0 * half * y),
        60.0 * knee,
        600.0 * knee,
        epsrel=1e-8,
        epsabs=1e-300,
        limit=800,
    )
    return 8.0 * (head + body + tail_mean + osc)
