"""Real-argument gamma, zeta and polylogarithm, plus the Hankel-type
contour integrals used by the critical-regime asymptotics.

Only the quadrature oracle and nothing else relies on scipy; all other
functions are self-contained so they can be checked against independent
implementations.
"""
from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np

from ._roots import increasing_root
from .errors import DomainError

__all__ = [
    "gamma_real",
    "log_gamma_real",
    "rgamma",
    "zeta_real",
    "harmonic",
    "polylog",
    "polylog_series",
    "polylog_expansion",
    "polylog_inverse",
    "j_integral",
    "j_integral_quadrature",
    "j_tilde",
    "gamma_sqrt_mgf",
]

# Lanczos approximation, g = 7, nine terms (relative error about 1e-15).
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _sinpi(x: float) -> float:
    """sin(pi*x) with argument reduction so large x keeps full accuracy."""
    r = math.fmod(x, 2.0)
    if r == 0.0 or r == 1.0 or r == -1.0:
        return 0.0
    return math.sin(math.pi * r)


def _lanczos_sum(x: float) -> float:
    # x is the shifted argument (x - 1 in the usual presentation)
    a = _LANCZOS[0]
    for k in range(1, 9):
        a += _LANCZOS[k] / (x + k)
    return a


def gamma_real(x: float) -> float:
    """Gamma function for real ``x`` (poles at non-positive integers)."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise DomainError(f"gamma has a pole at {x!r}")
    if x < 0.5:
        return math.pi / (_sinpi(x) * gamma_real(1.0 - x))
    if x > 171.7:
        return math.inf
    y = x - 1.0
    t = y + _LANCZOS_G + 0.5
    # split the power so t**(y + 0.5) cannot overflow before exp(-t) is applied
    half = t ** (0.5 * (y + 0.5))
    return math.sqrt(2.0 * math.pi) * half * (half * math.exp(-t)) * _lanczos_sum(y)


def log_gamma_real(x: float) -> float:
    """log|Gamma(x)|; for positive ``x`` this is log Gamma(x)."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise DomainError(f"gamma has a pole at {x!r}")
    if x < 0.5:
        return math.log(math.pi / abs(_sinpi(x))) - log_gamma_real(1.0 - x)
    y = x - 1.0
    t = y + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (y + 0.5) * math.log(t) - t + math.log(_lanczos_sum(y))


def rgamma(x: float) -> float:
    """Reciprocal gamma 1/Gamma(x), an entire function (zero at the poles)."""
    x = float(x)
    if _is_nonpositive_integer(x):
        return 0.0
    if x > 171.0:
        return math.exp(-log_gamma_real(x))
    return 1.0 / gamma_real(x)


# Borwein's alternating-series acceleration for the Dirichlet eta function.
_BORWEIN_N = 40


@lru_cache(maxsize=1)
def _borwein_weights() -> tuple:
    n = _BORWEIN_N
    d = []
    acc = 0
    for i in range(n + 1):
        acc += math.factorial(n + i - 1) * 4**i * n // (math.factorial(n - i) * math.factorial(2 * i))
        d.append(acc)
    dn = d[n]
    return tuple(((-1) ** k) * (dn - d[k]) / dn for k in range(n))


def _eta(s: float) -> float:
    w = _borwein_weights()
    return math.fsum(w[k] * (k + 1.0) ** (-s) for k in range(len(w)))


def zeta_real(s: float) -> float:
    """Riemann zeta function for real ``s != 1``.

    Non-negative arguments use the accelerated eta series; negative ones go
    through the functional equation.
    """
    s = float(s)
    if s == 1.0:
        raise DomainError("zeta has a pole at s = 1")
    if s >= 0.0:
        if s > 60.0:
            return 1.0 + 2.0**-s + 3.0**-s
        return _eta(s) / -math.expm1((1.0 - s) * math.log(2.0))
    if s == math.floor(s) and int(s) % 2 == 0:
        return 0.0
    t = 1.0 - s
    return (
        2.0**s
        * math.pi ** (s - 1.0)
        * _sinpi(0.5 * s)
        * math.exp(log_gamma_real(t))
        * zeta_real(t)
    )


def harmonic(n: int) -> float:
    """Harmonic number H_n (H_0 = 0)."""
    return math.fsum(1.0 / k for k in range(1, n + 1))


def polylog_series(s: float, z: float, tol: float = 1e-17) -> float:
    """Direct power series sum_k z^k / k^s for |z| < 1 (or z = 1, s > 1 slowly).

    Summed in vectorised chunks until the remaining geometric tail is below
    ``tol`` relative to the partial sum.
    """
    s = float(s)
    z = float(z)
    if z == 0.0:
        return 0.0
    if not -1.0 < z < 1.0:
        raise DomainError("direct polylog series requires |z| < 1")
    log_abs = math.log(abs(z))
    sign = 1.0 if z > 0 else -1.0
    total = 0.0
    start = 1
    chunk = 4096
    while True:
        k = np.arange(start, start + chunk, dtype=np.float64)
        terms = np.exp(k * log_abs - s * np.log(k))
        if sign < 0:
            terms = terms * np.where(k % 2 == 1, -1.0, 1.0)
        total += float(np.sum(terms))
        last = abs(float(terms[-1]))
        tail = last * abs(z) / (1.0 - abs(z))
        # terms decrease once k exceeds s / log(1/|z|)
        decreasing = (start + chunk) * -log_abs > s
        if decreasing and tail <= tol * max(abs(total), 1e-300):
            return total
        start += chunk
        if start > 10**8:
            raise DomainError("direct polylog series failed to converge")


@lru_cache(maxsize=256)
def _expansion_coeffs(s: float, order: int) -> tuple:
    """Coefficients zeta(s-n)/n! of the regular part, n = 0..order."""
    is_int = s == math.floor(s) and s >= 1
    q = int(s) if is_int else None
    out = []
    for n in range(order + 1):
        if q is not None and n == q - 1:
            out.append(0.0)
        else:
            out.append(zeta_real(s - n) / math.factorial(n))
    return tuple(out)


def polylog_expansion(s: float, z: float, min_order: int = 8, max_order: int = 40) -> float:
    """Singular expansion of Li_s around z = 1 in powers of w = -log z.

    Uses Gamma(1-s) w^(s-1) for non-integer s and the harmonic-number
    logarithmic term for integer s >= 1. The regular series is summed up to
    at least ``min_order`` and on until the terms fall below double precision.
    """
    s = float(s)
    z = float(z)
    if not 0.0 < z <= 1.0:
        raise DomainError("polylog expansion requires 0 < z <= 1")
    w = -math.log(z)
    is_int = s == math.floor(s) and s >= 1
    if w == 0.0:
        if s > 1.0:
            return zeta_real(s)
        return math.inf
    if is_int:
        q = int(s)
        sing = (-1) ** q * w ** (q - 1) * (math.log(w) - harmonic(q - 1)) / math.factorial(q - 1)
    else:
        sing = gamma_real(1.0 - s) * w ** (s - 1.0)
    coeffs = _expansion_coeffs(s, max_order)
    total = 0.0
    power = 1.0
    prev = math.inf
    for n, c in enumerate(coeffs):
        term = c * power
        total += term
        # zeta vanishes at negative even integers, so require two small terms
        small = 1e-17 * (abs(total) + abs(sing))
        if n >= min_order and abs(term) <= small and abs(prev) <= small:
            break
        prev = term
        power *= -w
    return sing + total


def polylog(s: float, z: float) -> float:
    """Polylogarithm Li_s(z) for real s and real z in [-0.5, 1].

    Direct series on z <= 0.5, singular expansion above. Returns ``inf``
    at z = 1 when s <= 1 (divergent).
    """
    s = float(s)
    z = float(z)
    if z > 1.0 or z < -0.5 or math.isnan(z):
        raise DomainError(f"polylog argument {z!r} outside [-0.5, 1]")
    if z == 1.0 and s <= 1.0:
        return math.inf
    if s == 1.0:
        return -math.log1p(-z)
    if s == 0.0:
        return z / (1.0 - z)
    if z <= 0.5:
        return polylog_series(s, z)
    return polylog_expansion(s, z)


def polylog_inverse(s: float, y: float) -> float:
    """Inverse of r -> Li_s(r) on (0, 1).

    For s > 1 the range is (0, zeta(s)); an argument equal to zeta(s) up to
    rounding returns the boundary value 1.0 exactly.
    """
    s = float(s)
    y = float(y)
    if y <= 0.0:
        raise DomainError("polylog inverse requires y > 0")
    if s == 1.0:
        return -math.expm1(-y)
    if s > 1.0:
        top = zeta_real(s)
        if abs(y - top) <= 4.0 * math.ulp(top):
            return 1.0
        if y > top:
            raise DomainError(f"y = {y!r} exceeds Li_{s}(1) = {top!r}")
        hi = 1.0
    else:
        hi = math.nextafter(1.0, 0.0)
        if polylog(s, hi) < y:
            raise DomainError(f"y = {y!r} beyond representable range of Li_{s}")
    return increasing_root(
        lambda r: polylog(s, r),
        y,
        0.0,
        hi,
        df=lambda r: polylog(s - 1.0, r) / r if r > 0 else 1.0,
        rtol=1e-15,
    )


def _pochhammer_series(a: float, b: float, xi: float):
    """Return (sum_m (a)_m xi^(2m)/(2m)!, sum_m (b)_m xi^(2m+1)/(2m+1)!)."""
    even = 0.0
    odd = 0.0
    te = 1.0
    to = xi
    x2 = xi * xi
    m = 0
    while True:
        even += te
        odd += to
        if m > abs(a) + abs(b) + x2 + 2 and abs(te) + abs(to) <= 1e-17 * (abs(even) + abs(odd) + 1e-300):
            break
        te *= (a + m) * x2 / ((2 * m + 1) * (2 * m + 2))
        to *= (b + m) * x2 / ((2 * m + 2) * (2 * m + 3))
        m += 1
        if m > 5000:
            raise DomainError("Pochhammer series did not converge")
    return even, odd


def j_integral(xi: float, sigma: float) -> complex:
    """Closed form of the contour integral of (-w)^(-sigma) exp(-xi w + w^2).

    Evaluated as i*pi*exp(-xi^2/4) * sum_n Gamma((sigma+n)/2) xi^n / n!
    divided by Gamma((sigma+1)/2) Gamma(sigma/2), with the even and odd
    parts regrouped through reciprocal gammas so the result is entire in
    sigma.
    """
    xi = float(xi)
    sigma = float(sigma)
    even, odd = _pochhammer_series(sigma / 2.0, (sigma + 1.0) / 2.0, xi)
    val = rgamma((sigma + 1.0) / 2.0) * even + rgamma(sigma / 2.0) * odd
    return complex(0.0, math.pi * math.exp(-xi * xi / 4.0) * val)


def j_integral_quadrature(
    xi: float, sigma: float, phi: float = 1.2, epsilon: float = 0.5
) -> complex:
    """Numerical quadrature of the same integral along the keyhole contour.

    The contour enters along the ray of angle -phi, circles the origin
    through the negative axis at radius ``epsilon`` and leaves along the
    ray of angle +phi. Intended as an independent oracle for
    :func:`j_integral`.
    """
    from scipy.integrate import quad

    if not math.pi / 4 < phi < math.pi / 2:
        raise DomainError("phi must lie in (pi/4, pi/2)")
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")

    def integrand(w: complex) -> complex:
        return (-w) ** (-sigma) * cmath.exp(-xi * w + w * w)

    def ray_end(angle: float) -> float:
        c1 = -xi * math.cos(angle)
        c2 = math.cos(2.0 * angle)
        y = max(epsilon, 1.0)
        while True:
            logmag = -sigma * math.log(y) + c1 * y + c2 * y * y
            slope = -sigma / y + c1 + 2.0 * c2 * y
            if logmag < math.log(1e-18) and slope < 0:
                return y
            y *= 1.05

    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=2000, complex_func=True)
    e_in = cmath.exp(-1j * phi)
    e_out = cmath.exp(1j * phi)
    y_in = ray_end(-phi)
    y_out = ray_end(phi)
    leg1, _ = quad(lambda y: -integrand(y * e_in) * e_in, epsilon, y_in, **opts)
    leg2, _ = quad(
        lambda t: integrand(epsilon * cmath.exp(-1j * t)) * (-1j * epsilon * cmath.exp(-1j * t)),
        phi,
        2.0 * math.pi - phi,
        **opts,
    )
    leg3, _ = quad(lambda y: integrand(y * e_out) * e_out, epsilon, y_out, **opts)
    return complex(leg1 + leg2 + leg3)


def j_tilde(sigma: float, s: float) -> complex:
    """Closed form 2*pi*i / (s * Gamma((s - 1 + sigma)/s)) for s in (1, 2]."""
    if not 1.0 < s <= 2.0:
        raise DomainError("j_tilde requires s in (1, 2]")
    return complex(0.0, 2.0 * math.pi * rgamma((s - 1.0 + sigma) / s) / s)


def gamma_sqrt_mgf(theta_star: float, xi: float) -> float:
    """E[exp(xi * sqrt(X))] for X ~ Gamma(theta_star / 2)."""
    if theta_star <= 0:
        raise DomainError("theta_star must be positive")
    a = theta_star / 2.0
    b = (theta_star + 1.0) / 2.0
    even, odd = _pochhammer_series(a, b, float(xi))
    ratio = math.exp(log_gamma_real(b) - log_gamma_real(a))
    return even + ratio * odd
