"""Exact finite-N expectations and laws built on the partition-sum table."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DomainError, ModelSupportError
from .series import SeriesTable, build_table
from .weights import WeightModel

__all__ = [
    "ExactValue",
    "FactorialMomentSpec",
    "factorial_moment",
    "expected_cycle_counts",
    "l1_pmf",
    "joint_l_pmf",
    "expected_long_fraction",
]


class ExactValue(NamedTuple):
    """A nonnegative quantity with its logarithm; ``in_support`` is False when
    the arguments fall outside the support and the value is exactly zero."""

    log_value: float
    value: float
    in_support: bool = True


def _make(log_value: float) -> ExactValue:
    if log_value == -math.inf:
        return ExactValue(-math.inf, 0.0, True)
    return ExactValue(log_value, math.exp(min(log_value, 709.0)), True)


_OUTSIDE = ExactValue(-math.inf, 0.0, False)


@dataclass(frozen=True)
class FactorialMomentSpec:
    """Pairs (j, n_j) requesting E[prod_j (C_j)_{n_j}]."""

    pairs: tuple

    def __post_init__(self) -> None:
        js = [j for j, _ in self.pairs]
        if len(set(js)) != len(js):
            raise DomainError("cycle lengths in a factorial moment must be distinct")
        if any(j < 1 or n < 1 for j, n in self.pairs):
            raise DomainError("need j >= 1 and n_j >= 1")

    @property
    def total_points(self) -> int:
        return sum(j * n for j, n in self.pairs)


def _table(model: WeightModel, n_points: int, table: Optional[SeriesTable]) -> SeriesTable:
    if table is None:
        table = build_table(model, n_points)
    if table.n_points != n_points or table.n_max < n_points:
        raise DomainError("table does not match N")
    if table.log_h[n_points] == -math.inf:
        raise ModelSupportError("H_N = 0: no admissible cycle type")
    return table


def factorial_moment(
    model: WeightModel,
    n_points: int,
    spec: FactorialMomentSpec | Iterable,
    table: Optional[SeriesTable] = None,
) -> ExactValue:
    """E[prod_j (C_j)_{n_j}] = h_{N-K}(N)/H_N * prod_j (w_j/j)^{n_j}."""
    if not isinstance(spec, FactorialMomentSpec):
        spec = FactorialMomentSpec(tuple(tuple(p) for p in spec))
    k = spec.total_points
    if k > n_points:
        return _OUTSIDE
    tab = _table(model, n_points, table)
    log_val = tab.log_h[n_points - k] - tab.log_H
    for j, nj in spec.pairs:
        lw = tab.log_weights[j - 1]
        if lw == -math.inf:
            return _make(-math.inf)
        log_val += nj * (lw - math.log(j))
    return _make(float(log_val))


def expected_cycle_counts(
    model: WeightModel, n_points: int, j_max: Optional[int] = None, table: Optional[SeriesTable] = None
) -> np.ndarray:
    """E[C_j] = (w_j/j) h_{N-j}(N)/H_N for j = 1..j_max."""
    if j_max is None:
        j_max = n_points
    if not 1 <= j_max <= n_points:
        raise DomainError("need 1 <= j_max <= N")
    tab = _table(model, n_points, table)
    j = np.arange(1, j_max + 1)
    log_e = tab.log_weights[:j_max] - np.log(j) + tab.log_h[n_points - j] - tab.log_H
    return np.exp(log_e)


def l1_pmf(model: WeightModel, n_points: int, table: Optional[SeriesTable] = None) -> np.ndarray:
    """P(L_1 = l) = (w_l/N) h_{N-l}(N)/H_N for l = 1..N."""
    tab = _table(model, n_points, table)
    return np.exp(tab.step_log_pmf(n_points))


def joint_l_pmf(
    model: WeightModel,
    n_points: int,
    lengths: Sequence[int],
    table: Optional[SeriesTable] = None,
) -> ExactValue:
    """Joint probability of the first m lexicographic cycle lengths."""
    lengths = [int(l) for l in lengths]
    if any(l < 1 for l in lengths):
        raise DomainError("cycle lengths must be >= 1")
    if sum(lengths) > n_points:
        return _OUTSIDE
    tab = _table(model, n_points, table)
    remaining = n_points
    log_val = 0.0
    for l in lengths:
        lw = tab.log_weights[l - 1]
        if lw == -math.inf:
            return _make(-math.inf)
        log_val += lw - math.log(remaining)
        remaining -= l
    log_val += tab.log_h[remaining] - tab.log_H
    return _make(float(log_val))


def expected_long_fraction(
    model: WeightModel, n_points: int, k: int, table: Optional[SeriesTable] = None
) -> float:
    """1 - (1/N) sum_{j<=K} j E[C_j], the expected share of points in cycles longer than K."""
    if not 0 <= k < n_points:
        raise DomainError("need 0 <= K < N")
    if k == 0:
        return 1.0
    # summing the long tail directly avoids cancellation when the share is small
    counts = expected_cycle_counts(model, n_points, n_points, table)
    j = np.arange(1, n_points + 1)
    return math.fsum((j * counts)[k:]) / n_points
