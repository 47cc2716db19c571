"""Lattice sums versus integrals for spatial cycle weights on a torus of side L.

For a dispersion eps0 (Gaussian s**2 or stable |s|**gamma) the spatial model
weights a j-cycle by the lattice sum  S_j = (sum_k exp(-j eps0(k/L)))**d,
while the surrogate keeps only its integral part L**d * I_j with
I_j = (int exp(-j eps0(s)) ds)**d. The difference Delta_j = S_j - L**d I_j is
what the surrogate coefficients theta_j try to emulate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "SpatialConfig",
    "riemann_sum",
    "integral_weight",
    "delta_correction",
    "poisson_dual_sum",
    "dual_tail_bound",
    "heuristic_Theta",
    "heuristic_theta",
    "theta_shape",
    "order_parameter",
    "tail_deviations",
    "check_universal_tail",
    "spatial_grid",
    "GRID_COLUMNS",
]

TERM_CUTOFF = 1e-18
MAX_DIRECT_TERMS = 10**6
_LOG_CUTOFF = math.log(TERM_CUTOFF)
GRID_COLUMNS = ("family", "d", "gamma", "L", "j", "sum", "integral_term", "delta")


@dataclass(frozen=True)
class SpatialConfig:
    """Dispersion family, dimension d, box side L and density rho = N / L**d."""

    family: str = "gaussian"
    d: int = 1
    L: float = 1.0
    gamma: Optional[float] = None
    rho: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in ("gaussian", "stable"):
            raise DomainError(f"unknown family {self.family!r}")
        if self.d < 1:
            raise DomainError("dimension must be >= 1")
        if not self.L > 0:
            raise DomainError("box side must be positive")
        if not self.rho > 0:
            raise DomainError("density must be positive")
        if self.family == "stable" and not (self.gamma is not None and 0 < self.gamma < 2):
            raise DomainError("stable family needs gamma in (0, 2)")

    @property
    def exponent(self) -> float:
        """Scaling exponent of the dispersion: 2 (Gaussian) or gamma."""
        return 2.0 if self.family == "gaussian" else float(self.gamma)

    @property
    def n_points(self) -> float:
        return self.rho * self.L**self.d

    def with_L(self, L: float) -> "SpatialConfig":
        return SpatialConfig(self.family, self.d, L, self.gamma, self.rho)


def _check_j(j: float) -> None:
    if not j > 0:
        raise DomainError("j must be positive")


def _direct_1d(cfg: SpatialConfig, j: float) -> float:
    a = cfg.exponent
    # exp(-j (k/L)**a) < TERM_CUTOFF beyond k_max
    k_max = int(math.ceil(cfg.L * (-_LOG_CUTOFF / j) ** (1.0 / a)))
    if k_max > MAX_DIRECT_TERMS:
        raise DomainError(f"lattice sum needs {k_max} terms; j / L**{a:g} too small for direct summation")
    k = np.arange(1, k_max + 1, dtype=float)
    terms = np.exp(-j * (k / cfg.L) ** a)
    return 1.0 + 2.0 * math.fsum(terms[::-1])


def _dual_rel(cfg: SpatialConfig, j: float) -> float:
    """2 * sum_{l >= 1} exp(-pi^2 l^2 L^2 / j): relative Gaussian correction."""
    c = math.pi**2 * cfg.L**2 / j
    total = 0.0
    l = 1
    while True:
        t = math.exp(-c * l * l)
        total += t
        if t < TERM_CUTOFF * max(total, 1e-300) or t == 0.0:
            break
        l += 1
    return 2.0 * total


def _gaussian_use_dual(cfg: SpatialConfig, j: float) -> bool:
    # below j = L^2 the dual series needs a handful of terms, above it the direct one does
    return j < cfg.L**2


def _sum_1d(cfg: SpatialConfig, j: float, method: str) -> float:
    if method == "auto":
        method = "dual" if cfg.family == "gaussian" and _gaussian_use_dual(cfg, j) else "direct"
    if method == "direct":
        return _direct_1d(cfg, j)
    if method == "dual":
        if cfg.family != "gaussian":
            raise DomainError("the dual series is only available for the Gaussian family")
        return cfg.L * math.sqrt(math.pi / j) * (1.0 + _dual_rel(cfg, j))
    raise DomainError(f"unknown method {method!r}")


def riemann_sum(cfg: SpatialConfig, j: float, method: str = "auto") -> float:
    """(sum_{k in Z} exp(-j eps0(k/L)))**d."""
    _check_j(j)
    return _sum_1d(cfg, j, method) ** cfg.d


def _integral_1d(cfg: SpatialConfig, j: float) -> float:
    if cfg.family == "gaussian":
        return math.sqrt(math.pi / j)
    g = cfg.gamma
    return 2.0 * math.gamma(1.0 + 1.0 / g) * j ** (-1.0 / g)


def integral_weight(cfg: SpatialConfig, j: float) -> float:
    """(int exp(-j eps0(s)) ds)**d in closed form."""
    _check_j(j)
    return _integral_1d(cfg, j) ** cfg.d


def delta_correction(cfg: SpatialConfig, j: float) -> float:
    """Lattice sum minus L**d times the integral weight.

    Computed as L**d I_j * expm1(d * log1p(rel)) with rel the 1-D relative
    excess, so small corrections keep full relative accuracy.
    """
    _check_j(j)
    base = cfg.L * _integral_1d(cfg, j)
    if cfg.family == "gaussian" and _gaussian_use_dual(cfg, j):
        rel = _dual_rel(cfg, j)
    else:
        rel = _direct_1d(cfg, j) / base - 1.0
    return base**cfg.d * math.expm1(cfg.d * math.log1p(rel))


def poisson_dual_sum(cfg: SpatialConfig, j: float) -> float:
    """L**d (sum_l f_j(l L))**d with f_j(x) = sqrt(pi/j) exp(-pi^2 x^2 / j) (Gaussian only)."""
    if cfg.family != "gaussian":
        raise DomainError("Poisson dual sum is defined for the Gaussian family")
    _check_j(j)
    return _sum_1d(cfg, j, "dual") ** cfg.d


def dual_tail_bound(cfg: SpatialConfig, j: float) -> tuple:
    """(sum_{l != 0} f_j(l L), (4/L) int_{L/2}^inf f_j) for the Gaussian kernel."""
    if cfg.family != "gaussian":
        raise DomainError("dual tail bound is defined for the Gaussian family")
    _check_j(j)
    tail = math.sqrt(math.pi / j) * _dual_rel(cfg, j)
    bound = (2.0 / cfg.L) * special.erfc(math.pi * cfg.L / (2.0 * math.sqrt(j)))
    return tail, bound


def order_parameter(cfg: SpatialConfig, j: float) -> float:
    """eta = L * j**(-1/a), a = 2 (Gaussian) or gamma (stable)."""
    _check_j(j)
    return cfg.L * j ** (-1.0 / cfg.exponent)


def heuristic_Theta(eta: float) -> float:
    """1 / (1 - exp(-1/eta)); tends to 1 as eta -> 0 and to eta as eta -> inf."""
    if not eta > 0:
        raise DomainError("eta must be positive")
    return -1.0 / math.expm1(-1.0 / eta)


def theta_shape(cfg: SpatialConfig, Theta: float) -> float:
    """Scale-free heuristic shape: Theta**(d-1) exp(-Theta**2) or Theta**(d-1-gamma)."""
    if cfg.family == "gaussian":
        return Theta ** (cfg.d - 1) * math.exp(-Theta * Theta)
    return Theta ** (cfg.d - 1 - cfg.gamma)


def heuristic_theta(cfg: SpatialConfig, j: float, scale: float = 1.0) -> float:
    """Heuristic e^{alpha_j} theta_{j,L} up to the multiplicative ``scale``."""
    return scale * theta_shape(cfg, heuristic_Theta(order_parameter(cfg, j)))


def tail_deviations(cfg: SpatialConfig, L_grid: Iterable[float]) -> List[float]:
    """|riemann_sum - 1| along L_grid with j = L**a * log L."""
    out = []
    for L in L_grid:
        c = cfg.with_L(L)
        j = L**cfg.exponent * math.log(L)
        out.append(abs(riemann_sum(c, j) - 1.0))
    return out


def check_universal_tail(cfg: SpatialConfig, L_grid: Iterable[float]) -> bool:
    """True when the deviations of the lattice sum from 1 strictly decrease along the grid."""
    dev = tail_deviations(cfg, L_grid)
    return all(b < a for a, b in zip(dev, dev[1:]))


def spatial_grid(cfg: SpatialConfig, L_grid: Iterable[float], j_grid: Iterable[float]) -> List[tuple]:
    """Rows (family, d, gamma, L, j, sum, integral_term, delta) over the grid."""
    rows = []
    js = list(j_grid)
    for L in L_grid:
        c = cfg.with_L(L)
        for j in js:
            s = riemann_sum(c, j)
            integral = c.L**c.d * integral_weight(c, j)
            rows.append((c.family, c.d, c.gamma, float(L), j, s, integral, delta_correction(c, j)))
    return rows
