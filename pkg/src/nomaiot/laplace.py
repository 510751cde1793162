"""Per-zone Laplace factors of the interference from one device.

A device in zone z, transmitting with power P over a path-loss exponent
alpha, contributes E[exp(-s P x^-alpha |h|^2)] to the interference Laplace
transform, averaged over its distance x and its fading gain. The transform
of a whole interference field is the product of these factors because the
devices are independent.

* Rayleigh fading in an annulus reduces to 2F1(1, -2/alpha; 1-2/alpha; .).
* Nakagami-m fading in a shell is integrated directly over the distance;
  the incomplete-Beta form is available as an independent cross-check.
"""

from __future__ import annotations

from scipy import integrate

from .errors import DomainError
from .geometry import ZoneGeometry
from .specfun import QUAD_EPSABS, QUAD_EPSREL, QUAD_LIMIT, gauss_2f1_neg, inc_beta_gen


def _check_s(s):
    if s < 0:
        raise DomainError(f"Laplace argument must be nonnegative, got {s!r}")


def annulus_factor(s: float, P: float, alpha: float, zone: ZoneGeometry) -> float:
    """Rayleigh-faded device uniform in an annulus (or disc zone).

    (hi^2 F(-sP hi^-a) - lo^2 F(-sP lo^-a)) / (hi^2 - lo^2),
    F = 2F1(1, -2/a; 1-2/a; .).
    """
    _check_s(s)
    if s == 0 or P == 0:
        return 1.0
    delta = 2.0 / alpha
    lo, hi = zone.inner, zone.outer
    c = s * P
    top = hi * hi * gauss_2f1_neg(delta, -c * hi ** (-alpha))
    bot = lo * lo * gauss_2f1_neg(delta, -c * lo ** (-alpha))
    return (top - bot) / (hi * hi - lo * lo)


def annulus_factor_direct(s: float, P: float, alpha: float, zone: ZoneGeometry) -> float:
    """Same quantity as ``annulus_factor`` by integrating over the distance."""
    _check_s(s)
    if s == 0 or P == 0:
        return 1.0
    lo, hi = zone.inner, zone.outer
    c = s * P
    val, _ = integrate.quad(lambda x: 2.0 * x / (1.0 + c * x ** (-alpha)), lo, hi,
                            epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    return val / (hi * hi - lo * lo)


def shell_factor(s: float, P: float, alpha: float, m: int, zone: ZoneGeometry) -> float:
    """Nakagami-m device uniform in a spherical shell.

    E_x[(1 + sP x^-alpha / m)^-m] with density 3x^2/(hi^3 - lo^3).
    """
    _check_s(s)
    if s == 0 or P == 0:
        return 1.0
    lo, hi = zone.inner, zone.outer
    c = s * P / m
    val, _ = integrate.quad(lambda x: 3.0 * x * x * (1.0 + c * x ** (-alpha)) ** (-m), lo, hi,
                            epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    return val / zone.measure


def shell_factor_beta(s: float, P: float, alpha: float, m: int, zone: ZoneGeometry) -> float:
    """``shell_factor`` through the incomplete Beta function.

    With w = (sP/m) x^-alpha and delta = 3/alpha the factor is
    delta (sP/m)^delta / (hi^3 - lo^3) * [B~(w_lo) - B~(w_hi)] where
    B~ is ``inc_beta_gen`` at -w with a = -delta, b = 1 - m. Requires
    alpha > 3; at alpha = 3 the Beta parameter hits -1 and only the direct
    integral is defined.
    """
    _check_s(s)
    if s == 0 or P == 0:
        return 1.0
    delta = 3.0 / alpha
    if delta >= 1:
        raise DomainError("Beta form needs alpha > 3; use shell_factor")
    c = s * P / m
    w_lo = c * zone.inner ** (-alpha)
    w_hi = c * zone.outer ** (-alpha)
    a, b = -delta, 1.0 - m
    diff = inc_beta_gen(-w_lo, a, b) - inc_beta_gen(-w_hi, a, b)
    return delta * c ** delta * diff / zone.measure
