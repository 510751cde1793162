"""Special functions and quadrature rules used by the coverage expressions.

Only the narrow parameter patterns needed by the coverage formulas are
covered; nothing here tries to be a general special-function library.

* ``gauss_2f1_neg``   2F1(1, -d; 1-d; z) for 0 < d < 1 and z <= 0
* ``inc_beta_gen``    incomplete Beta B(x; a, b) continued to -1 < a < 0
* ``lower_inc_gamma`` lower incomplete Gamma function
* ``pochhammer``      rising factorial
* ``chebyshev_rule``  Gauss-Chebyshev (first kind) nodes and weights
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DomainError

# Inner integrals are evaluated well below the 1e-10 absolute / 1e-8 relative
# contract so that finite-difference derivatives built on top stay clean.
QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 200

SERIES_RTOL = 1e-12
SERIES_MAX_TERMS = 500


def _quad(f, a, b):
    val, _err = integrate.quad(f, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                               limit=QUAD_LIMIT)
    return val


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Chebyshev rule on (-1, 1).

    ``sum(weights * sqrt(1 - nodes**2) * f(nodes))`` approximates the
    unweighted integral of ``f`` over (-1, 1).
    """

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    @property
    def xi(self) -> np.ndarray:
        """sqrt(1 - nu_n^2), the factor that removes the Chebyshev weight."""
        return np.sqrt(1.0 - self.nodes ** 2)

    def integrate(self, f, lo: float = -1.0, hi: float = 1.0) -> float:
        """Approximate the plain integral of vectorised ``f`` over (lo, hi)."""
        half = 0.5 * (hi - lo)
        x = lo + half * (self.nodes + 1.0)
        return float(half * np.sum(self.weights * self.xi * f(x)))


def chebyshev_rule(N: int) -> QuadratureRule:
    if int(N) != N or N < 1:
        raise DomainError(f"quadrature order must be a positive integer, got {N!r}")
    N = int(N)
    n = np.arange(1, N + 1)
    nodes = np.cos((2 * n - 1) * np.pi / (2 * N))
    weights = np.full(N, np.pi / N)
    return QuadratureRule(nodes=nodes, weights=weights, order=N)


def pochhammer(x: float, n: int) -> float:
    """Rising factorial (x)_n = x (x+1) ... (x+n-1); (x)_0 = 1."""
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    out = 1.0
    for k in range(int(n)):
        out *= x + k
    return out


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")


def _int_small(delta: float, u: float) -> float:
    # int_0^u v^-d/(1+v) dv with v = w^(1/(1-d)); the integrand becomes smooth
    p = 1.0 / (1.0 - delta)
    return p * _quad(lambda w: 1.0 / (1.0 + w ** p), 0.0, u ** (1.0 - delta))


def _int_tail(delta: float, u: float) -> float:
    # int_u^inf v^-d/(1+v) dv with v = y^(-1/d)
    q = 1.0 / delta
    return q * _quad(lambda y: 1.0 / (1.0 + y ** q), 0.0, u ** (-delta))


def gauss_2f1_neg(delta: float, z: float) -> float:
    """2F1(1, -delta; 1-delta; z) for 0 < delta < 1 and z <= 0.

    Uses the integral the function arises from when averaging
    ``1 / (1 + c x^-alpha)`` over an annulus::

        2F1(1, -d; 1-d; -u) = 1 + d u^d int_0^u v^-d / (1 + v) dv

    For u > 1 the integral is split as pi / sin(pi d) minus the tail so that
    both pieces are well conditioned. The value is >= 1 and grows like u^d.
    """
    _check_delta(delta)
    if z > 0:
        raise DomainError(f"z must be <= 0, got {z!r}")
    u = -float(z)
    if u == 0.0:
        return 1.0
    if u <= 1.0:
        integral = _int_small(delta, u)
    else:
        integral = math.pi / math.sin(math.pi * delta) - _int_tail(delta, u)
    return 1.0 + delta * u ** delta * integral


def gauss_2f1_neg_series(delta: float, z: float, max_terms: int = SERIES_MAX_TERMS) -> float:
    """Pochhammer-series evaluation of 2F1(1, -delta; 1-delta; z), z <= 0.

    The Pfaff transformation maps z onto w = z / (z - 1) in [0, 1):
    2F1(1, -d; 1-d; z) = (1 - z)^d 2F1(-d, -d; 1-d; w). Terms are added until
    |term| < 1e-12 |partial sum|; ConvergenceError after ``max_terms``.
    """
    _check_delta(delta)
    if z > 0:
        raise DomainError(f"z must be <= 0, got {z!r}")
    if z == 0:
        return 1.0
    w = z / (z - 1.0)
    total, term = 1.0, 1.0
    for n in range(max_terms):
        term *= (n - delta) * (n - delta) / ((n + 1 - delta) * (n + 1)) * w
        total += term
        if abs(term) < SERIES_RTOL * abs(total):
            return (1.0 - z) ** delta * total
    raise ConvergenceError(
        f"2F1 series did not converge in {max_terms} terms (delta={delta}, z={z})")


def inc_beta_gen(x: float, a: float, b: float) -> float:
    """Incomplete Beta B(x; a, b) continued to -1 < a < 1, a != 0, x < 1.

    For 0 <= x < 1 this is the usual ``int_0^x t^(a-1) (1-t)^(b-1) dt``, with
    the divergent part of a negative ``a`` regularised by analytic
    continuation (equivalently x^a/a * 2F1(a, 1-b; a+1; x)).

    For x < 0 the continuation carries the phase (-1)^a. This function returns
    the real value with that phase removed::

        B(x; a, b) * (-1)^-a = int_0^|x| w^(a-1) (1+w)^(b-1) dw  (regularised)

    The phase cancels against the (-sP/m)^delta prefactor of the aerial
    Laplace transform, so callers pair this with the real (sP/m)^delta.
    """
    if a == 0 or abs(a) >= 1:
        raise DomainError(f"require 0 < |a| < 1, got a={a!r}")
    if x >= 1:
        raise DomainError(f"require x < 1, got x={x!r}")
    if x == 0:
        return 0.0
    y = abs(float(x))
    sign = 1.0 if x < 0 else -1.0
    bm1 = b - 1.0

    def h(w):
        # ((1 + sign*w)^(b-1) - 1) / w, smooth at w = 0
        if w == 0.0:
            return sign * bm1
        return math.expm1(bm1 * math.log1p(sign * w)) / w

    p = 1.0 / (1.0 + a)
    # w^a h(w) dw with w = v^p becomes p h(v^p) dv
    reg = p * _quad(lambda v: h(v ** p), 0.0, y ** (1.0 + a))
    return y ** a / a + reg


def lower_inc_gamma(s: float, x: float) -> float:
    """gamma(s, x) = int_0^x t^(s-1) e^-t dt for s > 0, x >= 0."""
    if s <= 0:
        raise DomainError(f"s must be positive, got {s!r}")
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    if x == 0:
        return 0.0
    return float(special.gammainc(s, x) * special.gamma(s))


def lower_inc_gamma_scaled(s: float, x: float) -> float:
    """gamma(s, x) / x^s, finite for every x >= 0 (limit 1/s at x = 0).

    Needed when gamma(s, x) underflows but its ratio to x^s does not, as in
    the term-by-term integration of a power series against e^-x.
    """
    if s <= 0:
        raise DomainError(f"s must be positive, got {s!r}")
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    if x == 0:
        return 1.0 / s
    p = special.gammainc(s, x)
    if p > 1e-280:
        return float(math.exp(math.log(p) + special.gammaln(s) - s * math.log(x)))
    # Kummer series: gamma(s,x)/x^s = e^-x sum_k x^k / (s (s+1) ... (s+k))
    term = 1.0 / s
    total = term
    for k in range(1, 10_000):
        term *= x / (s + k)
        total += term
        if term < 1e-17 * total:
            break
    return math.exp(-x) * total
