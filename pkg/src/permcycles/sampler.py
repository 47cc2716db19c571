"""Exact sequential sampling of lexicographic cycle lengths.

Given n points still unassigned, the next cycle length l is drawn from
P(l | n) = w_l h_{n-l}(N) / (n h_n(N)), which telescopes to the exact joint
law of (L_1, L_2, ...). The inverse CDF is scanned upward from l = 1, so a
draw costs O(l) and a whole sample costs O(N).

Monte Carlo runs split the samples into fixed blocks; block ``b`` draws from
``Philox(SeedSequence(seed).spawn(b + 1)[b])``, so results do not depend on
the number of worker threads.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numba
import numpy as np

from .errors import DomainError, ModelSupportError
from .series import SeriesTable, build_table
from .weights import WeightModel

__all__ = [
    "CycleType",
    "McSummary",
    "sample_cycle_type",
    "sample_lengths",
    "run_monte_carlo",
    "ordered_lengths",
    "block_generator",
    "resolve_threads",
    "BLOCK_SIZE",
]

BLOCK_SIZE = 4096


@numba.njit(cache=True, nogil=True)
def _draw_one(log_w, log_h, n_points, gen, out):
    n = n_points
    c = 0
    while n > 0:
        u = gen.random()
        base = -math.log(n) - log_h[n]
        acc = 0.0
        pick = 0
        last = 0
        for l in range(1, n + 1):
            t = log_w[l - 1] + log_h[n - l]
            if t == -np.inf:
                continue
            acc += math.exp(t + base)
            last = l
            if u < acc:
                pick = l
                break
        if pick == 0:
            # u landed in the rounding gap above the cumulative total
            pick = last
        out[c] = pick
        c += 1
        n -= pick
    return c


@numba.njit(cache=True, nogil=True)
def _stats_block(log_w, log_h, n_points, n_samples, gen, sum_c, sumsq_c, t_out, top_out):
    buf = np.empty(n_points, np.int64)
    cnt = np.zeros(n_points + 1, np.int64)
    top_k = top_out.shape[1]
    for i in range(n_samples):
        c = _draw_one(log_w, log_h, n_points, gen, buf)
        t_out[i] = c
        for q in range(c):
            cnt[buf[q]] += 1
        for q in range(c):
            l = buf[q]
            k = cnt[l]
            if k > 0:
                sum_c[l] += k
                sumsq_c[l] += k * k
                cnt[l] = 0
        for q in range(c):
            v = buf[q]
            if v > top_out[i, top_k - 1]:
                p = top_k - 1
                while p > 0 and top_out[i, p - 1] < v:
                    top_out[i, p] = top_out[i, p - 1]
                    p -= 1
                top_out[i, p] = v


@numba.njit(cache=True, nogil=True)
def _lengths_one(log_w, log_h, n_points, gen):
    buf = np.empty(n_points, np.int64)
    c = _draw_one(log_w, log_h, n_points, gen, buf)
    return buf[:c].copy()


@dataclass(frozen=True)
class CycleType:
    """Cycle lengths of one permutation in lexicographic (generation) order."""

    lengths: tuple

    def __post_init__(self) -> None:
        if any(l < 1 for l in self.lengths):
            raise DomainError("cycle lengths must be >= 1")

    @property
    def n_points(self) -> int:
        return int(sum(self.lengths))

    @property
    def total(self) -> int:
        return len(self.lengths)

    def counts(self, j_max: Optional[int] = None) -> np.ndarray:
        """C_j for j = 1..j_max (default N), as index j-1."""
        j_max = self.n_points if j_max is None else j_max
        c = np.bincount(np.asarray(self.lengths, dtype=np.int64), minlength=j_max + 1)
        return c[1 : j_max + 1]


def ordered_lengths(ct: CycleType | Sequence[int]) -> tuple:
    """Cycle lengths sorted in descending order."""
    lengths = ct.lengths if isinstance(ct, CycleType) else tuple(ct)
    return tuple(sorted(lengths, reverse=True))


def _prepare(table: SeriesTable) -> tuple:
    n = table.n_points
    if table.n_max < n:
        raise DomainError("sampling needs a table built with n_max >= N")
    if table.log_h[n] == -math.inf:
        raise ModelSupportError("H_N = 0: no admissible cycle type")
    return np.ascontiguousarray(table.log_weights[:n]), np.ascontiguousarray(table.log_h), n


def sample_cycle_type(model: WeightModel, table: SeriesTable, rng: np.random.Generator) -> CycleType:
    """Draw one cycle type from the exact law."""
    lw, lh, n = _prepare(table)
    return CycleType(tuple(int(v) for v in _lengths_one(lw, lh, n, rng)))


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Independent generator for sample block ``block`` of a seeded run."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(block),))
    return np.random.Generator(np.random.Philox(ss))


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: explicit value, else PERMCYCLES_THREADS, else CPU count."""
    if threads is None:
        env = os.environ.get("PERMCYCLES_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def _blocks(n_samples: int, block_size: int) -> List[tuple]:
    out = []
    start = 0
    b = 0
    while start < n_samples:
        size = min(block_size, n_samples - start)
        out.append((b, start, size))
        start += size
        b += 1
    return out


def sample_lengths(
    model: WeightModel,
    n_points: int,
    n_samples: int,
    seed: int,
    table: Optional[SeriesTable] = None,
    block_size: int = BLOCK_SIZE,
) -> List[np.ndarray]:
    """Draw ``n_samples`` full lexicographic length sequences (deterministic in seed)."""
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    table = build_table(model, n_points) if table is None else table
    lw, lh, n = _prepare(table)
    out: List[np.ndarray] = []
    for b, _, size in _blocks(n_samples, block_size):
        gen = block_generator(seed, b)
        for _ in range(size):
            out.append(_lengths_one(lw, lh, n, gen))
    return out


@dataclass
class McSummary:
    """Aggregated Monte Carlo statistics of cycle types.

    ``top_lengths[i]`` holds the ``top_k`` largest cycle lengths of sample i
    (zero padded); ``t_values[i]`` its total number of cycles.
    """

    n_points: int
    n_samples: int
    seed: int
    mean_counts: np.ndarray
    var_counts: np.ndarray
    t_values: np.ndarray
    top_lengths: np.ndarray
    nu_tilde: Optional[float] = None
    sum_lengths_ok: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def t_hist(self) -> np.ndarray:
        """Histogram of T_N over k = 0..N."""
        return np.bincount(self.t_values, minlength=self.n_points + 1)

    def count_se(self) -> np.ndarray:
        """Standard error of the mean cycle counts."""
        return np.sqrt(self.var_counts / self.n_samples)

    def scaled_ordered(self, nu_tilde: Optional[float] = None) -> np.ndarray:
        """Ordered lengths L^(k) divided by N * nu_tilde."""
        nu = self.nu_tilde if nu_tilde is None else nu_tilde
        if nu is None or nu <= 0:
            raise DomainError("scaling by N*nu_tilde needs nu_tilde > 0")
        return self.top_lengths / (self.n_points * nu)


def run_monte_carlo(
    model: WeightModel,
    n_points: int,
    n_samples: int,
    seed: int,
    threads: Optional[int] = None,
    top_k: int = 8,
    table: Optional[SeriesTable] = None,
    nu_tilde: Optional[float] = None,
    block_size: int = BLOCK_SIZE,
) -> McSummary:
    """Sample ``n_samples`` cycle types and aggregate their statistics."""
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    table = build_table(model, n_points) if table is None else table
    lw, lh, n = _prepare(table)
    blocks = _blocks(n_samples, block_size)
    t_values = np.zeros(n_samples, np.int64)
    top = np.zeros((n_samples, top_k), np.int64)

    def work(item):
        b, start, size = item
        sum_c = np.zeros(n + 1, np.int64)
        sumsq_c = np.zeros(n + 1, np.int64)
        _stats_block(
            lw, lh, n, size, block_generator(seed, b), sum_c, sumsq_c,
            t_values[start : start + size], top[start : start + size],
        )
        return sum_c, sumsq_c

    workers = min(resolve_threads(threads), len(blocks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(item) for item in blocks]
    sum_c = np.zeros(n + 1, np.int64)
    sumsq_c = np.zeros(n + 1, np.int64)
    for s, q in parts:
        sum_c += s
        sumsq_c += q
    mean = sum_c[1:] / n_samples
    if n_samples > 1:
        var = (sumsq_c[1:] - n_samples * mean**2) / (n_samples - 1)
        var = np.maximum(var, 0.0)
    else:
        var = np.zeros(n)
    ok = bool(np.sum(np.arange(1, n + 1) * sum_c[1:]) == n * n_samples)
    return McSummary(
        n_points=n,
        n_samples=n_samples,
        seed=int(seed),
        mean_counts=mean,
        var_counts=var,
        t_values=t_values,
        top_lengths=top,
        nu_tilde=nu_tilde,
        sum_lengths_ok=ok,
    )
