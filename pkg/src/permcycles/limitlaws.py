"""GEM, Poisson-Dirichlet and delayed stick-breaking samplers with moment oracles.

Delayed stick-breaking: with eta_0 = 1, step n breaks the remaining stick
only with probability u(eta_{n-1}) = nu*eta/(1 - nu + nu*eta); a break
removes the fraction B_n ~ Beta(1, theta) of it:

    D_n = xi_n B_n,  X_n = eta_{n-1} D_n,  eta_n = eta_{n-1} (1 - D_n).

With nu = 1 every step breaks and the process is GEM(theta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, special

from .errors import DomainError

__all__ = [
    "StickPath",
    "DEFAULT_TERMS",
    "gem_from_breaks",
    "sample_gem",
    "sample_pd",
    "sample_stick",
    "sample_stick_batch",
    "stick_moments",
    "sample_stick_degenerate",
    "pd_largest_mean",
]

DEFAULT_TERMS = 256


@dataclass(frozen=True)
class StickPath:
    """One realization of the delayed stick-breaking process.

    ``eta`` holds eta_0..eta_n (eta_0 = 1); the other arrays are indexed by
    step 1..n at position n-1. ``tau`` lists the steps at which a break happened.
    """

    nu: float
    theta_star: float
    xi: np.ndarray
    D: np.ndarray
    eta: np.ndarray
    X: np.ndarray
    tau: np.ndarray

    @property
    def tail_mass(self) -> float:
        return float(self.eta[-1])

    def ordered(self) -> np.ndarray:
        return np.sort(self.X)[::-1]

    def identity_defect(self) -> float:
        """max_n |sum_{j<=n} X_j - (1 - eta_n)|."""
        return float(np.max(np.abs(np.cumsum(self.X) - (1.0 - self.eta[1:]))))


def _check_theta(theta: float) -> None:
    if not theta > 0:
        raise DomainError("theta must be positive")


def _check_nu(nu: float) -> None:
    if not 0 < nu <= 1:
        raise DomainError("nu must lie in (0, 1]")


def _beta1(theta: float, u: np.ndarray) -> np.ndarray:
    # Beta(1, theta) by inversion
    return -np.expm1(np.log1p(-u) / theta)


def gem_from_breaks(breaks) -> np.ndarray:
    """Y_n = B_n prod_{j<n} (1 - B_j) for given break fractions."""
    b = np.asarray(breaks, dtype=float)
    remaining = np.concatenate(([1.0], np.cumprod(1.0 - b)[:-1]))
    return b * remaining


def sample_gem(theta: float, n_terms: int, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """First ``n_terms`` GEM(theta) weights (shape (size, n_terms) when ``size`` is given)."""
    _check_theta(theta)
    shape = (n_terms,) if size is None else (size, n_terms)
    b = _beta1(theta, rng.random(shape))
    remaining = np.cumprod(1.0 - b, axis=-1)
    prev = np.concatenate((np.ones(shape[:-1] + (1,)), remaining[..., :-1]), axis=-1)
    return b * prev


def sample_pd(theta: float, n_terms: int, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """GEM(theta) sorted in descending order; the limit n_terms -> inf is PD(theta)."""
    y = sample_gem(theta, n_terms, rng, size)
    return -np.sort(-y, axis=-1)


def _u_star(nu: float, x):
    return nu * x / (1.0 - nu + nu * x)


def sample_stick(nu: float, theta_star: float, n_terms: int, rng: np.random.Generator) -> StickPath:
    """One path of the delayed stick-breaking process.

    Each step draws the Beta uniform first and, when nu < 1, a second uniform
    for the break indicator. With nu = 1 no indicator is drawn, so the same
    generator state yields exactly the GEM sample of ``sample_gem``.
    """
    _check_nu(nu)
    _check_theta(theta_star)
    b = _beta1(theta_star, rng.random(n_terms))
    xi = np.ones(n_terms, dtype=np.int8)
    eta = np.empty(n_terms + 1)
    eta[0] = 1.0
    x = np.empty(n_terms)
    d = np.empty(n_terms)
    if nu < 1.0:
        v = rng.random(n_terms)
    for n in range(n_terms):
        if nu < 1.0:
            xi[n] = 1 if v[n] < _u_star(nu, eta[n]) else 0
        d[n] = b[n] if xi[n] else 0.0
        x[n] = eta[n] * d[n]
        eta[n + 1] = eta[n] * (1.0 - d[n])
    tau = np.flatnonzero(xi) + 1
    return StickPath(nu, theta_star, xi, d, eta, x, tau)


def sample_stick_batch(
    nu: float,
    theta_star: float,
    n_terms: int,
    size: int,
    rng: np.random.Generator,
    keep: Optional[int] = None,
) -> tuple:
    """Run ``size`` independent paths for ``n_terms`` steps.

    Returns (X[:, :keep], largest piece, eta_n). Steps are drawn column by
    column so memory stays O(size * keep).
    """
    _check_nu(nu)
    _check_theta(theta_star)
    keep = n_terms if keep is None else min(keep, n_terms)
    eta = np.ones(size)
    head = np.zeros((size, keep))
    largest = np.zeros(size)
    for n in range(n_terms):
        b = _beta1(theta_star, rng.random(size))
        brk = rng.random(size) < _u_star(nu, eta)
        x = np.where(brk, eta * b, 0.0)
        if n < keep:
            head[:, n] = x
        np.maximum(largest, x, out=largest)
        eta = eta - x
    return head, largest, eta


def stick_moments(nu: float, theta_star: float, n1: int, n2: int) -> float:
    """Closed-form mixed moments of the first two stick pieces.

    n2 = 0:            E[X_1^n1]
    n1 >= 1, n2 >= 1:  E[X_1^n1 X_2^n2 (1 - nu X_1)]
    n1 = 0:            E[X_2^n2 (1 - nu X_1)]
    """
    _check_nu(nu)
    if n1 < 0 or n2 < 0 or (n1 == 0 and n2 == 0):
        raise DomainError("need n1, n2 >= 0, not both zero")
    lg = math.lgamma
    t = theta_star
    if n2 == 0:
        return nu * math.exp(lg(n1 + 1) + lg(t + 1) - lg(t + n1 + 1))
    if n1 >= 1:
        return t * nu**2 * math.exp(lg(n1 + 1) + lg(n2 + 1) + lg(t + 1) - lg(t + n1 + n2 + 2))
    return (t + (n2 + 1) * (1.0 - nu)) * nu * math.exp(lg(n2 + 1) + lg(t + 1) - lg(t + n2 + 2))


def sample_stick_degenerate(nu: float, n_terms: int, rng: np.random.Generator) -> StickPath:
    """theta* = 0 limit: the whole stick goes at a geometric(nu) step tau_1.

    If tau_1 exceeds ``n_terms`` the path is all zeros and ``eta`` stays 1.
    """
    _check_nu(nu)
    tau1 = int(rng.geometric(nu))
    x = np.zeros(n_terms)
    xi = np.zeros(n_terms, dtype=np.int8)
    if tau1 <= n_terms:
        x[tau1 - 1] = 1.0
        xi[tau1 - 1] = 1
    eta = 1.0 - np.concatenate(([0.0], np.cumsum(x)))
    return StickPath(nu, 0.0, xi, x.copy(), eta, x, np.array([tau1]))


def pd_largest_mean(theta: float) -> float:
    """E[largest PD(theta) piece] = int_0^inf exp(-y - theta E_1(y)) dy."""
    _check_theta(theta)
    val, _ = integrate.quad(lambda y: math.exp(-y - theta * special.exp1(y)), 0.0, math.inf, epsabs=1e-13)
    return val
