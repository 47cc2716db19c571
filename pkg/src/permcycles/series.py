"""Exact log-space partition sums h_n(N) and the law of the cycle count T_N.

h_n(N) = [z^n] exp(g_theta(z) + N g_kappa(z)) obeys
n h_n = sum_{j=1}^n w_j h_{n-j} with h_0 = 1, which is evaluated here with a
streaming log-sum-exp so nothing overflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DomainError, ModelSupportError, SizeLimitError
from .weights import WeightModel, weights_array

__all__ = [
    "SeriesTable",
    "TnDistribution",
    "build_table",
    "log_partition",
    "tn_pmf",
    "TN_CAP",
]

TN_CAP = 512
NEG_INF = -np.inf


@numba.njit(cache=True, nogil=True)
def _log_h_kernel(log_w, n_max):
    log_h = np.full(n_max + 1, -np.inf)
    log_h[0] = 0.0
    for n in range(1, n_max + 1):
        m = -np.inf
        for j in range(1, n + 1):
            t = log_w[j - 1] + log_h[n - j]
            if t > m:
                m = t
        if m == -np.inf:
            continue
        acc = 0.0
        for j in range(1, n + 1):
            t = log_w[j - 1] + log_h[n - j]
            if t > -np.inf:
                acc += math.exp(t - m)
        log_h[n] = m + math.log(acc) - math.log(n)
    return log_h


@numba.njit(cache=True, nogil=True)
def _tn_kernel(log_w, n):
    # lc[m, k] = log c_{m,k}, c_{m,k} = (1/m) sum_j w_j c_{m-j,k-1}
    lc = np.full((n + 1, n + 1), -np.inf)
    lc[0, 0] = 0.0
    for m in range(1, n + 1):
        lm = math.log(m)
        for k in range(1, m + 1):
            mx = -np.inf
            for j in range(1, m - k + 2):
                t = log_w[j - 1] + lc[m - j, k - 1]
                if t > mx:
                    mx = t
            if mx == -np.inf:
                continue
            acc = 0.0
            for j in range(1, m - k + 2):
                t = log_w[j - 1] + lc[m - j, k - 1]
                if t > -np.inf:
                    acc += math.exp(t - mx)
            lc[m, k] = mx + math.log(acc) - lm
    return lc[n]


def _log_weights(model: WeightModel, n_points: int, n: int) -> np.ndarray:
    w = weights_array(model, n_points, n)
    with np.errstate(divide="ignore"):
        return np.log(w)


@dataclass(frozen=True)
class SeriesTable:
    """log h_n(N) for n = 0..n_max at fixed N, with the cached log-weights."""

    n_points: int
    log_h: np.ndarray
    log_weights: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.log_h) - 1

    @property
    def log_H(self) -> float:
        if self.n_max < self.n_points:
            raise DomainError("table does not reach n = N")
        return float(self.log_h[self.n_points])

    def h(self, n: int) -> float:
        return math.exp(self.log_h[n])

    def step_log_pmf(self, n: int) -> np.ndarray:
        """log P(next length = l | n points left), l = 1..n."""
        if not 1 <= n <= self.n_max:
            raise DomainError("n outside table range")
        if self.log_h[n] == NEG_INF:
            raise ModelSupportError(f"h_{n}(N) = 0: no admissible cycle type")
        l = np.arange(1, n + 1)
        return self.log_weights[:n] + self.log_h[n - l] - math.log(n) - self.log_h[n]


def build_table(model: WeightModel, n_points: int, n_max: int | None = None) -> SeriesTable:
    """Compute log h_0(N), ..., log h_{n_max}(N) in O(n_max^2)."""
    if n_points < 1:
        raise DomainError("N must be >= 1")
    if n_max is None:
        n_max = n_points
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    lw = _log_weights(model, n_points, max(n_max, 1))
    log_h = _log_h_kernel(lw, n_max)
    return SeriesTable(n_points=n_points, log_h=log_h, log_weights=lw)


def log_partition(model: WeightModel, n_points: int) -> float:
    """log H_N = log h_N(N)."""
    return build_table(model, n_points).log_H


@dataclass(frozen=True)
class TnDistribution:
    """log P(T_N = k) for k = 1..N (index 0 holds k = 1)."""

    n_points: int
    log_pmf: np.ndarray

    @property
    def pmf(self) -> np.ndarray:
        return np.exp(self.log_pmf)

    def mean(self) -> float:
        k = np.arange(1, self.n_points + 1)
        return float(np.sum(k * self.pmf))


def tn_pmf(model: WeightModel, n_points: int, cap: int = TN_CAP) -> TnDistribution:
    """Exact law of the total number of cycles via the bivariate recurrence."""
    if n_points < 1:
        raise DomainError("N must be >= 1")
    if n_points > cap:
        raise SizeLimitError(
            f"N = {n_points} exceeds the T_N cap {cap} (cost O(N^3)); use Monte Carlo instead"
        )
    lw = _log_weights(model, n_points, n_points)
    row = _tn_kernel(lw, n_points)
    log_h_n = _log_h_kernel(lw, n_points)[n_points]
    if log_h_n == NEG_INF:
        raise ModelSupportError("H_N = 0: no admissible cycle type")
    return TnDistribution(n_points=n_points, log_pmf=row[1:] - log_h_n)
