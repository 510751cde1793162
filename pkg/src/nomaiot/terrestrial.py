"""Coverage of terrestrial devices under NOMA with distance-ordered SIC.

Device i sees the terrestrial devices of zones i+1..M (not yet cancelled),
every aerial device and noise. With Rayleigh fading on the desired link the
conditional coverage at distance r factorises as

    exp(-rho sigma^2) * L_g,i(rho) * L_u(rho),   rho = tau_i r^alpha_g / P_g

and is averaged over the zone's distance density.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from . import specfun
from .config import NetworkConfig
from .errors import ConfigError, ConvergenceError, DomainError, PreconditionError
from .geometry import zone as make_zone
from .laplace import annulus_factor, shell_factor, shell_factor_beta
from .report import CoverageReport

RADIAL_EPSABS = 1e-10
RADIAL_EPSREL = 1e-10
RADIAL_LIMIT = 10_000


def _check_index(i: int, cfg: NetworkConfig) -> None:
    if not 1 <= i <= cfg.M:
        raise DomainError(f"device index {i} outside 1..{cfg.M}")


def laplace_terr(s: float, i: int, cfg: NetworkConfig) -> float:
    """Laplace transform of the residual terrestrial interference at stage i."""
    _check_index(i, cfg)
    out = 1.0
    for c in range(i + 1, cfg.M + 1):
        out *= annulus_factor(s, cfg.P_g, cfg.alpha_g, make_zone(cfg, c, "terrestrial"))
    return out


def laplace_terr_closed_M2(s: float, cfg: NetworkConfig) -> float:
    """Two-device special case of ``laplace_terr`` for the near device."""
    if cfg.M != 2:
        raise ConfigError(f"closed form is for M = 2, got M = {cfg.M}")
    if s < 0:
        raise DomainError(f"Laplace argument must be nonnegative, got {s!r}")
    d, a = cfg.delta_g, cfg.alpha_g
    x = s * cfg.P_g * cfg.R ** (-a)
    return (4.0 / 3.0) * specfun.gauss_2f1_neg(d, -x) \
        - (1.0 / 3.0) * specfun.gauss_2f1_neg(d, -x * 2.0 ** a)


def laplace_aerial_into_terr(s: float, cfg: NetworkConfig, method: str = "quadrature") -> float:
    """Laplace transform of the interference from all M aerial devices."""
    factor = {"quadrature": shell_factor, "beta": shell_factor_beta}[method]
    out = 1.0
    for a in range(1, cfg.M + 1):
        out *= factor(s, cfg.P_u, cfg.alpha_u, cfg.m[a - 1], make_zone(cfg, a, "aerial"))
    return out


def _conditional(i: int, cfg: NetworkConfig):
    """Coverage at distance r for device i (vectorisation not needed)."""
    tau = cfg.tau[i - 1]

    def f(r):
        rho = tau * r ** cfg.alpha_g / cfg.P_g
        val = math.exp(-rho * cfg.sigma2)
        if val == 0.0:
            return 0.0
        val *= laplace_terr(rho, i, cfg)
        if cfg.P_u > 0:
            val *= laplace_aerial_into_terr(rho, cfg)
        return val
    return f


def _need_power(cfg: NetworkConfig) -> None:
    if cfg.P_g <= 0:
        raise DomainError("terrestrial coverage needs P_g > 0")


def coverage_exact(i: int, cfg: NetworkConfig) -> float:
    """Conditional coverage of terrestrial device i by adaptive radial quadrature."""
    _check_index(i, cfg)
    _need_power(cfg)
    z = make_zone(cfg, i, "terrestrial")
    g = _conditional(i, cfg)
    val, _ = integrate.quad(lambda r: 2.0 * r * g(r), z.inner, z.outer,
                            epsabs=RADIAL_EPSABS, epsrel=RADIAL_EPSREL, limit=RADIAL_LIMIT)
    return val / z.measure


def coverage_gc(i: int, cfg: NetworkConfig, N: int = 100) -> float:
    """Gauss-Chebyshev approximation of ``coverage_exact`` with N nodes."""
    _check_index(i, cfg)
    _need_power(cfg)
    rule = specfun.chebyshev_rule(N)
    z = make_zone(cfg, i, "terrestrial")
    g = _conditional(i, cfg)
    return rule.integrate(lambda r: np.array([2.0 * x * g(x) for x in r]) / z.measure,
                          z.inner, z.outer)


def _interferer_coefficients(i: int, cfg: NetworkConfig, nmax: int) -> np.ndarray:
    """Power-series coefficients of L_g,i in v = (r / outer_i)^alpha_g.

    Each interfering zone contributes (hi^2 F(-y_hi) - lo^2 F(-y_lo)) /
    (hi^2 - lo^2) with F expanded as sum (-d)_n / (1-d)_n (-y)^n; the
    product over zones is a Cauchy product of the coefficient sequences.
    """
    d, a = cfg.delta_g, cfg.alpha_g
    tau = cfg.tau[i - 1]
    top = make_zone(cfg, i, "terrestrial").outer
    n = np.arange(nmax + 1)
    p = np.ones(nmax + 1)
    for k in range(1, nmax + 1):
        p[k] = p[k - 1] * (k - 1 - d) / (k - d)
    base = p * (-tau) ** n
    coef = np.zeros(nmax + 1)
    coef[0] = 1.0
    for c in range(i + 1, cfg.M + 1):
        zc = make_zone(cfg, c, "terrestrial")
        lo, hi = zc.inner, zc.outer
        b = base * (hi * hi * (top / hi) ** (n * a) - lo * lo * (top / lo) ** (n * a)) / (hi * hi - lo * lo)
        coef = np.convolve(coef, b)[: nmax + 1]
    return coef


def coverage_low_rate(i: int, cfg: NetworkConfig, series_terms: int | None = None) -> float:
    """Series form of the terrestrial coverage for tau_i < 1 and P_u = 0.

    The 2F1 factors are expanded in powers of r^alpha_g and integrated term
    by term against the noise exponential, giving lower incomplete Gamma
    functions. ``series_terms=None`` sums until |term| < 1e-12 |sum| (at
    most 500 terms, ConvergenceError otherwise); an integer truncates.
    """
    _check_index(i, cfg)
    tau = cfg.tau[i - 1]
    if not tau < 1:
        raise PreconditionError(f"low-rate form needs tau_i < 1, got {tau}")
    if cfg.P_u > 0:
        raise PreconditionError("low-rate form needs P_u = 0")
    if cfg.P_g <= 0:
        raise PreconditionError("low-rate form needs P_g > 0")
    d, a = cfg.delta_g, cfg.alpha_g
    z = make_zone(cfg, i, "terrestrial")
    kappa = tau * cfg.sigma2 / cfg.P_g * z.outer ** a
    x0 = z.inner / z.outer
    scale = 2.0 * z.outer ** 2 / (a * z.measure)
    nmax = specfun.SERIES_MAX_TERMS if series_terms is None else int(series_terms)
    coef = _interferer_coefficients(i, cfg, nmax)

    total = 0.0
    for n in range(nmax + 1):
        s = n + d
        J = scale * (specfun.lower_inc_gamma_scaled(s, kappa)
                     - x0 ** (n * a + 2) * specfun.lower_inc_gamma_scaled(s, kappa * x0 ** a))
        term = coef[n] * J
        total += term
        if series_terms is None and n > 0 and abs(term) < specfun.SERIES_RTOL * abs(total):
            return total
        if cfg.M == i and n == 0 and series_terms is None:
            return total
    if series_terms is None:
        raise ConvergenceError(f"low-rate series not converged after {nmax} terms (tau={tau})")
    return total


def coverage_oma(i: int, cfg: NetworkConfig) -> float:
    """Coverage of terrestrial device i when it owns a 1/M slot (P_u = 0).

    Noise-only SNR with threshold 2^(M R_i / B) - 1; closed form in the lower
    incomplete Gamma function gamma(2/alpha_g, .).
    """
    _check_index(i, cfg)
    _need_power(cfg)
    d, a = cfg.delta_g, cfg.alpha_g
    z = make_zone(cfg, i, "terrestrial")
    phi = cfg.tau_oma[i - 1] * cfg.sigma2 / cfg.P_g
    G = specfun.lower_inc_gamma_scaled
    return 2.0 / (a * z.measure) * (z.outer ** 2 * G(d, phi * z.outer ** a)
                                    - z.inner ** 2 * G(d, phi * z.inner ** a))


def required_rbs(mode: str, n_devices: int, M: int = 1) -> int:
    """Resource blocks needed to serve ``n_devices`` under each access mode."""
    if n_devices < 1 or M < 1:
        raise DomainError("n_devices and M must be positive")
    if mode == "oma":
        return int(n_devices)
    if mode == "scma":
        # 150% overloading: 2 RBs per 3 devices
        return -(-2 * int(n_devices) // 3)
    if mode == "noma":
        return -(-int(n_devices) // int(M))
    raise DomainError(f"unknown access mode {mode!r}")


def coverage_report(cfg: NetworkConfig, method: str = "exact-quadrature", N: int = 100,
                    series_terms: int | None = None) -> CoverageReport:
    if method == "exact-quadrature":
        vals = [coverage_exact(i, cfg) for i in range(1, cfg.M + 1)]
    elif method == "gauss-chebyshev":
        vals = [coverage_gc(i, cfg, N) for i in range(1, cfg.M + 1)]
    elif method == "low-rate-closed-form":
        vals = [coverage_low_rate(i, cfg, series_terms) for i in range(1, cfg.M + 1)]
    elif method == "oma":
        vals = [coverage_oma(i, cfg) for i in range(1, cfg.M + 1)]
        return CoverageReport(tier="terrestrial", method=method, per_device=tuple(vals),
                              cumulative=tuple(vals), meta={"config": cfg})
    else:
        raise DomainError(f"unknown terrestrial method {method!r}")
    return CoverageReport.from_conditional("terrestrial", method, vals, config=cfg, N=N)
