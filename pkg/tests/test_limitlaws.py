import math

import numpy as np
import pytest
from scipy import stats

from permcycles.errors import DomainError
from permcycles.limitlaws import (
    gem_from_breaks,
    pd_largest_mean,
    sample_gem,
    sample_pd,
    sample_stick,
    sample_stick_batch,
    sample_stick_degenerate,
    stick_moments,
)


def test_gem_forced_breaks():
    assert np.allclose(gem_from_breaks([0.3, 0.5]), [0.3, 0.35], rtol=1e-15)


def test_gem_first_mean(rng):
    y1 = sample_gem(1.0, 4, rng, size=100_000)[:, 0]
    assert abs(y1.mean() - 0.5) < 3 * y1.std() / math.sqrt(y1.size)


def test_gem_mass_concentrates(rng):
    total = sample_gem(1.0, 200, rng, size=20_000).sum(axis=1)
    assert np.all(total < 1.0 + 1e-12)
    assert np.mean(total > 1 - 1e-6) >= 0.99


def test_pd_sorted_and_golomb_dickman(rng):
    x = sample_pd(1.0, 256, rng, size=100_000)
    assert np.all(np.diff(x, axis=1) <= 0)
    # independent oracle: E[largest] = int_0^inf exp(-y - E1(y)) dy
    assert pd_largest_mean(1.0) == pytest.approx(0.62432998854355, rel=1e-10)
    assert abs(x[:, 0].mean() - 0.6243) < 0.01


def test_pd_small_theta(rng):
    x = sample_pd(0.05, 256, rng, size=20_000)
    assert np.median(x[:, 0]) > 0.95


def test_stick_nu_one_is_gem():
    a = sample_gem(1.3, 64, np.random.default_rng(5))
    p = sample_stick(1.0, 1.3, 64, np.random.default_rng(5))
    assert np.array_equal(a, p.X)
    assert np.all(p.xi == 1)


def test_stick_first_break_probability(rng):
    xs, _, _ = sample_stick_batch(0.3, 1.0, 1, 200_000, rng)
    frac = np.mean(xs[:, 0] > 0)
    assert abs(frac - 0.3) < 4 * math.sqrt(0.3 * 0.7 / 200_000)


@pytest.mark.parametrize("nu, theta", [(0.3, 0.5), (0.7, 2.0), (1.0, 1.0), (0.05, 3.0)])
def test_stick_identity_per_path(nu, theta, rng):
    for _ in range(200):
        p = sample_stick(nu, theta, 128, rng)
        assert p.identity_defect() <= 4 * np.finfo(float).eps
        assert np.all(np.diff(p.eta) <= 0) and np.all(p.eta > 0)
        assert np.all((p.D >= 0) & (p.D < 1))
        assert np.array_equal(p.tau, np.flatnonzero(p.xi) + 1)


def test_stick_moment_examples():
    assert stick_moments(0.5, 1.0, 1, 0) == pytest.approx(0.25, rel=1e-14)
    # theta* nu^2 n1! n2! Gamma(theta*+1) / Gamma(theta* + n1 + n2 + 2)
    assert stick_moments(0.5, 1.0, 1, 1) == pytest.approx(0.25 / 24, rel=1e-14)
    with pytest.raises(DomainError):
        stick_moments(0.5, 1.0, 0, 0)


@pytest.mark.parametrize("nu, theta", [(0.3, 0.5), (0.7, 2.0)])
def test_stick_moments_monte_carlo(nu, theta):
    x, _, _ = sample_stick_batch(nu, theta, 2, 400_000, np.random.default_rng(31))
    for n1, n2 in [(1, 0), (3, 0), (1, 1), (2, 1), (0, 1), (0, 2)]:
        v = x[:, 0] ** n1 * x[:, 1] ** n2
        if n2:
            v = v * (1 - nu * x[:, 0])
        se = v.std() / math.sqrt(v.size)
        assert abs(v.mean() - stick_moments(nu, theta, n1, n2)) < 4 * se


def test_x1_law(rng):
    # atom 1 - nu at 0, otherwise density theta (1 - x)^(theta - 1)
    nu, theta = 0.4, 2.5
    x1 = sample_stick_batch(nu, theta, 1, 100_000, rng)[0][:, 0]
    assert abs(np.mean(x1 == 0) - (1 - nu)) < 0.01
    pos = x1[x1 > 0]
    assert stats.kstest(pos, lambda t: 1 - (1 - t) ** theta).statistic < 0.02


def test_stick_order_statistics_pd(rng):
    _, largest, eta = sample_stick_batch(0.4, 1.0, 400, 100_000, rng)
    pd = sample_pd(1.0, 256, rng, size=100_000)[:, 0]
    assert np.mean(eta) < 0.01
    assert stats.ks_2samp(largest, pd).statistic < 0.02


def test_degenerate(rng):
    p = sample_stick_degenerate(1.0, 16, rng)
    assert p.X[0] == 1.0 and p.X[1:].sum() == 0
    taus = np.array([sample_stick_degenerate(0.25, 400, rng).tau[0] for _ in range(20_000)])
    assert abs(taus.mean() - 4.0) < 3 * taus.std() / math.sqrt(taus.size)
    for _ in range(100):
        q = sample_stick_degenerate(0.3, 200, rng)
        assert np.count_nonzero(q.X) == 1 and q.X.max() == 1.0
        assert np.array_equal(q.ordered()[:2], [1.0, 0.0])


@pytest.mark.parametrize("bad", [0.0, -0.5, 1.5])
def test_nu_domain(bad, rng):
    with pytest.raises(DomainError):
        sample_stick(bad, 1.0, 4, rng)
