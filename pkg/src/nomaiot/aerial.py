"""Coverage of aerial devices (Nakagami-m links inside a semi-sphere).

Aerial device i sees aerial devices i+1..M, all M terrestrial devices and
noise. For a Rayleigh desired link (m_i = 1) the coverage factorises exactly
as on the ground. For a Gamma(m) desired gain the CCDF
P(g > x) = e^{-mx} sum_{k<m} (mx)^k / k! turns the coverage at distance r into

    sum_{k<m} (-s)^k / k! * d^k/ds^k [e^{-s sigma^2} L_u,i(s) L_g(s)],
    s = m tau_i r^alpha_u / P_u,

which is evaluated here with numerical derivatives in log(s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import specfun
from .config import NetworkConfig
from .errors import ConvergenceError, DomainError, PreconditionError
from .geometry import zone as make_zone
from .laplace import annulus_factor, shell_factor, shell_factor_beta
from .report import CoverageReport

RADIAL_EPSABS = 1e-10
RADIAL_EPSREL = 1e-10
RADIAL_LIMIT = 10_000
# finite-difference noise in the Gamma path sits near 1e-10 relative
GAMMA_EPSREL = 1e-8


def _check_index(i: int, cfg: NetworkConfig) -> None:
    if not 1 <= i <= cfg.M:
        raise DomainError(f"device index {i} outside 1..{cfg.M}")


def laplace_aerial_i(s: float, i: int, cfg: NetworkConfig, method: str = "quadrature") -> float:
    """Laplace transform of the aerial interference left when decoding device i."""
    _check_index(i, cfg)
    factor = {"quadrature": shell_factor, "beta": shell_factor_beta}[method]
    out = 1.0
    for c in range(i + 1, cfg.M + 1):
        out *= factor(s, cfg.P_u, cfg.alpha_u, cfg.m[c - 1], make_zone(cfg, c, "aerial"))
    return out


def laplace_terr_into_aerial(s: float, cfg: NetworkConfig) -> float:
    """Laplace transform of the interference from all M terrestrial devices."""
    out = 1.0
    for a in range(1, cfg.M + 1):
        out *= annulus_factor(s, cfg.P_g, cfg.alpha_g, make_zone(cfg, a, "terrestrial"))
    return out


def composite_laplace(s: float, i: int, cfg: NetworkConfig) -> float:
    """e^{-s sigma^2} L_u,i(s) L_g(s): Laplace transform of interference plus noise."""
    val = math.exp(-s * cfg.sigma2)
    if val == 0.0:
        return 0.0
    val *= laplace_aerial_i(s, i, cfg)
    if cfg.P_g > 0:
        val *= laplace_terr_into_aerial(s, cfg)
    return val


def _need_power(cfg: NetworkConfig) -> None:
    if cfg.P_u <= 0:
        raise DomainError("aerial coverage needs P_u > 0")


def coverage_aerial_rayleigh(i: int, cfg: NetworkConfig) -> float:
    """Conditional coverage of aerial device i with a Rayleigh desired link."""
    _check_index(i, cfg)
    _need_power(cfg)
    if cfg.m[i - 1] != 1:
        raise PreconditionError(f"device {i} has m = {cfg.m[i - 1]}; Rayleigh path needs m = 1")
    z = make_zone(cfg, i, "aerial")
    tau = cfg.tau[i - 1]

    def f(r):
        return 3.0 * r * r * composite_laplace(tau * r ** cfg.alpha_u / cfg.P_u, i, cfg)

    val, _ = integrate.quad(f, z.inner, z.outer, epsabs=RADIAL_EPSABS,
                            epsrel=RADIAL_EPSREL, limit=RADIAL_LIMIT)
    return val / z.measure


@dataclass(frozen=True)
class DerivativeStencil:
    """Finite-difference settings for derivatives taken in log(s).

    ``order`` is the highest derivative the stencil will be asked for;
    ``step`` is the log-step h; ``scheme`` is plain ``central`` differences
    or ``richardson`` extrapolation of steps h and h/2.
    """

    order: int = 2
    step: float = 1e-2
    scheme: str = "richardson"

    def __post_init__(self):
        if not 1e-6 <= self.step <= 1e-2:
            raise DomainError(f"stencil step must lie in [1e-6, 1e-2], got {self.step}")
        if not 0 <= self.order <= 2:
            raise DomainError(f"stencil order must be 0..2, got {self.order}")
        if self.scheme not in ("central", "richardson"):
            raise DomainError(f"unknown stencil scheme {self.scheme!r}")


RICHARDSON_TOL = 1e-4


def _log_derivs(g, h):
    """g(0), g'(0), g''(0) by central differences with step h."""
    gp, g0, gm = g(h), g(0.0), g(-h)
    return g0, (gp - gm) / (2 * h), (gp - 2 * g0 + gm) / (h * h)


def gamma_ccdf_term(phi, s: float, m: int, stencil: DerivativeStencil) -> float:
    """sum_{k<m} (-s)^k/k! phi^(k)(s) using derivatives in u = ln s.

    With g(u) = phi(e^u): s phi' = g', s^2 phi'' = g'' - g'.
    """
    if m == 1:
        return phi(s)

    def g(du):
        return phi(s * math.exp(du))

    def combine(g0, g1, g2):
        out = g0 - g1
        if m == 3:
            out += 0.5 * (g2 - g1)
        return out

    h = stencil.step
    if stencil.scheme == "central":
        return combine(*_log_derivs(g, h))

    a0, a1, a2 = _log_derivs(g, h)
    b0, b1, b2 = _log_derivs(g, h / 2)
    c0, c1, c2 = _log_derivs(g, h / 4)
    rich_coarse = combine(a0, (4 * b1 - a1) / 3, (4 * b2 - a2) / 3)
    rich_fine = combine(a0, (4 * c1 - b1) / 3, (4 * c2 - b2) / 3)
    if abs(rich_fine - rich_coarse) > RICHARDSON_TOL:
        raise ConvergenceError(
            f"derivative stencil unstable at s={s:.3e}: {rich_coarse} vs {rich_fine}")
    return rich_fine


def coverage_aerial_gamma(i: int, cfg: NetworkConfig, m: int | None = None,
                          stencil: DerivativeStencil | None = None) -> float:
    """Coverage of aerial device i with a Gamma(m) desired gain, m in {1, 2, 3}.

    ``m`` defaults to the configured Nakagami parameter of device i. The
    interference of every other device enters through its Laplace factor,
    so the same expression holds for any i and M.
    """
    _check_index(i, cfg)
    m = cfg.m[i - 1] if m is None else m
    if m not in (1, 2, 3):
        raise PreconditionError(f"supported Nakagami parameters are 1, 2, 3; got {m!r}")
    _need_power(cfg)
    stencil = stencil or DerivativeStencil(order=m - 1)
    z = make_zone(cfg, i, "aerial")
    tau = cfg.tau[i - 1]

    def phi(s):
        return composite_laplace(s, i, cfg)

    def f(r):
        s = m * tau * r ** cfg.alpha_u / cfg.P_u
        return 3.0 * r * r * gamma_ccdf_term(phi, s, m, stencil)

    # tolerances refer to the normalised coverage, hence the measure factor
    val, _ = integrate.quad(f, z.inner, z.outer, epsabs=RADIAL_EPSABS * z.measure,
                            epsrel=GAMMA_EPSREL if m > 1 else RADIAL_EPSREL, limit=RADIAL_LIMIT)
    return val / z.measure


def coverage_aerial_nearest_gamma(cfg: NetworkConfig, m: int | None = None,
                                  stencil: DerivativeStencil | None = None) -> float:
    """Coverage of the nearer of two aerial devices with Gamma(m) desired gain.

    ``m`` defaults to the configured Nakagami parameter of device 1. For
    m = 1 the sum has only its k = 0 term and this equals
    ``coverage_aerial_rayleigh(1, cfg)``.
    """
    if cfg.M != 2:
        raise PreconditionError(f"nearest-device Gamma coverage is for M = 2, got M = {cfg.M}")
    return coverage_aerial_gamma(1, cfg, m, stencil)


def _closed_poly(L, m):
    if m == 2:
        return -L * L + 2 * L
    return L ** 3 - 3 * L * L + 3 * L


def coverage_aerial_nearest_closed(cfg: NetworkConfig, m: int | None = None, N: int = 200) -> float:
    """Gauss-Chebyshev closed form for the nearer aerial device, P_g = 0, m in {2, 3}.

    sum over nodes t_n = R (nu_n + 1) / 4 of (6 / R^2) w xi_n t_n^2 p(L), with
    p(L) = 2L - L^2 (m = 2) or L^3 - 3L^2 + 3L (m = 3) and
    L = L_u,1(tau_1 t_n^alpha_u / P_u). The r0 cut-off is neglected.
    """
    if cfg.M != 2:
        raise PreconditionError(f"closed form is for M = 2, got M = {cfg.M}")
    if cfg.P_g != 0:
        raise PreconditionError("closed form needs P_g = 0")
    m = cfg.m[0] if m is None else m
    if m not in (2, 3):
        raise PreconditionError(f"closed form covers m = 2, 3; got {m!r}")
    _need_power(cfg)
    rule = specfun.chebyshev_rule(N)
    R = cfg.R
    t = R * (rule.nodes + 1.0) / 4.0
    w = 6.0 / R ** 2 * rule.weights * rule.xi * t ** 2
    L = np.array([laplace_aerial_i(cfg.tau[0] * tn ** cfg.alpha_u / cfg.P_u, 1, cfg) for tn in t])
    val = float(np.sum(w * _closed_poly(L, m)))
    # the rule itself integrates the density to 1 only up to its own error
    slack = abs(float(np.sum(w)) - 1.0) + 1e-12
    if not -slack <= val <= 1.0 + slack:
        raise ConvergenceError(f"closed-form coverage {val} outside [0, 1]")
    return val


def coverage_aerial(i: int, cfg: NetworkConfig) -> float:
    """Best available exact evaluation for aerial device i."""
    _check_index(i, cfg)
    if cfg.m[i - 1] == 1:
        return coverage_aerial_rayleigh(i, cfg)
    return coverage_aerial_gamma(i, cfg)


def coverage_report(cfg: NetworkConfig, method: str = "exact-quadrature", N: int = 200) -> CoverageReport:
    if method == "exact-quadrature":
        vals = [coverage_aerial(i, cfg) for i in range(1, cfg.M + 1)]
    elif method == "gauss-chebyshev":
        if cfg.M != 2:
            raise PreconditionError("aerial Gauss-Chebyshev form is for M = 2")
        vals = [coverage_aerial_nearest_closed(cfg, N=N), coverage_aerial(2, cfg)]
    else:
        raise DomainError(f"unknown aerial method {method!r}")
    return CoverageReport.from_conditional("aerial", method, vals, config=cfg, N=N)
