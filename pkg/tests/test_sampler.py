import math

import numpy as np
import pytest
from scipy import stats

from permcycles.errors import DomainError, ModelSupportError
from permcycles.exact_stats import expected_cycle_counts, joint_l_pmf
from permcycles.sampler import (
    CycleType,
    block_generator,
    ordered_lengths,
    resolve_threads,
    run_monte_carlo,
    sample_cycle_type,
    sample_lengths,
)
from permcycles.series import build_table
from permcycles.weights import SequenceRule, WeightModel

from conftest import reference_models


def test_single_point_always_fixed(const11, rng):
    tab = build_table(const11, 1)
    for _ in range(20):
        assert sample_cycle_type(const11, tab, rng).lengths == (1,)


def test_only_top_weight_gives_single_cycle(rng):
    n = 7
    m = WeightModel(SequenceRule("table", table=(0.0,) * (n - 1) + (1.0,)), SequenceRule("table", table=()))
    tab = build_table(m, n)
    for _ in range(20):
        assert sample_cycle_type(m, tab, rng).lengths == (n,)


def test_first_draw_n2(const11):
    draws = sample_lengths(const11, 2, 100_000, seed=5)
    ones = sum(1 for d in draws if d[0] == 1)
    chi2 = stats.chisquare([ones, len(draws) - ones], [75_000, 25_000])
    assert chi2.pvalue > 1e-3


def test_mean_c1_n2(const11):
    mc = run_monte_carlo(const11, 2, 100_000, seed=11)
    assert abs(mc.mean_counts[0] - 1.5) < 4 * mc.count_se()[0]


@pytest.mark.parametrize("name", ["constant", "supercritical", "giant"])
def test_lengths_sum_to_n(name):
    m = reference_models()[name]
    for d in sample_lengths(m, 300, 200, seed=3):
        assert int(d.sum()) == 300 and d.min() >= 1
    assert run_monte_carlo(m, 300, 200, seed=3).sum_lengths_ok


def test_single_sample_summary(const11):
    d = sample_lengths(const11, 12, 1, seed=99)[0]
    mc = run_monte_carlo(const11, 12, 1, seed=99, top_k=12)
    assert np.array_equal(mc.mean_counts, CycleType(tuple(d)).counts(12))
    assert mc.t_values[0] == len(d)
    assert tuple(int(v) for v in mc.top_lengths[0] if v) == ordered_lengths(tuple(d))
    assert np.all(mc.var_counts == 0)


def test_seed_determinism_and_thread_independence(const11):
    a = run_monte_carlo(const11, 64, 3000, seed=42, threads=1, block_size=500)
    b = run_monte_carlo(const11, 64, 3000, seed=42, threads=4, block_size=500)
    assert np.array_equal(a.mean_counts, b.mean_counts)
    assert np.array_equal(a.var_counts, b.var_counts)
    assert np.array_equal(a.t_values, b.t_values)
    assert np.array_equal(a.top_lengths, b.top_lengths)
    c = run_monte_carlo(const11, 64, 3000, seed=43, threads=1, block_size=500)
    assert not np.array_equal(a.t_values, c.t_values)


def test_histogram_totals(const11):
    mc = run_monte_carlo(const11, 30, 777, seed=1)
    assert mc.t_hist.sum() == 777
    assert len(mc.t_values) == 777


def test_sample_lengths_consistent_with_summary(const11):
    draws = sample_lengths(const11, 40, 100, seed=8)
    mc = run_monte_carlo(const11, 40, 100, seed=8)
    assert np.array_equal(mc.t_values, [len(d) for d in draws])


def test_small_n_joint_law(supercritical):
    n = 5
    tab = build_table(supercritical, n)
    draws = sample_lengths(supercritical, n, 200_000, seed=17, table=tab)
    counts = {}
    for d in draws:
        key = (int(d[0]), int(d[1]) if len(d) > 1 else 0)
        counts[key] = counts.get(key, 0) + 1
    keys = [(a, b) for a in range(1, n + 1) for b in (range(1, n - a + 1) if a < n else [0])]
    probs = np.array([joint_l_pmf(supercritical, n, (a,) if b == 0 else (a, b), table=tab).value for a, b in keys])
    obs = np.array([counts.get(k, 0) for k in keys])
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert stats.chisquare(obs, probs * len(draws)).pvalue > 1e-3


def test_expected_counts_match_mc(supercritical):
    n = 40
    mc = run_monte_carlo(supercritical, n, 40_000, seed=2)
    e = expected_cycle_counts(supercritical, n)
    z = (mc.mean_counts[:5] - e[:5]) / mc.count_se()[:5]
    assert np.all(np.abs(z) < 4.5)


@pytest.mark.parametrize("lengths, expect", [((1, 3, 2), (3, 2, 1)), ((5,), (5,)), ((2, 2, 1), (2, 2, 1))])
def test_ordered_lengths(lengths, expect):
    assert ordered_lengths(CycleType(lengths)) == expect


def test_cycle_type_fields():
    ct = CycleType((3, 1, 1))
    assert ct.n_points == 5 and ct.total == 3
    assert list(ct.counts()) == [2, 0, 1, 0, 0]
    with pytest.raises(DomainError):
        CycleType((0, 2))


def test_block_generators_differ():
    a = block_generator(1, 0).random(4)
    b = block_generator(1, 1).random(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, block_generator(1, 0).random(4))


def test_resolve_threads(monkeypatch):
    monkeypatch.setenv("PERMCYCLES_THREADS", "3")
    assert resolve_threads() == 3
    assert resolve_threads(2) == 2


def test_unsupported_model_rejected():
    m = WeightModel(SequenceRule("table", table=(0.0, 1.0)), SequenceRule("table", table=()))
    with pytest.raises(ModelSupportError):
        run_monte_carlo(m, 3, 10, seed=1)


def test_scaled_ordered_requires_nu(const11):
    mc = run_monte_carlo(const11, 10, 5, seed=1)
    with pytest.raises(DomainError):
        mc.scaled_ordered()
    assert np.allclose(mc.scaled_ordered(0.5), mc.top_lengths / 5.0)
