import math

import mpmath
import numpy as np
import pytest

from permcycles.errors import DomainError
from permcycles.spatial_bridge import (
    SpatialConfig,
    check_universal_tail,
    delta_correction,
    dual_tail_bound,
    heuristic_Theta,
    heuristic_theta,
    integral_weight,
    poisson_dual_sum,
    riemann_sum,
    spatial_grid,
    tail_deviations,
    theta_shape,
)


def gauss(d, L):
    return SpatialConfig("gaussian", d, L)


def stable(d, L, g):
    return SpatialConfig("stable", d, L, g)


def test_gaussian_sum_tends_to_one():
    vals = [riemann_sum(gauss(1, 10), j) for j in (1e3, 1e4, 1e5)]
    assert vals[-1] == pytest.approx(1.0, abs=1e-40)
    assert vals[0] > vals[1] >= vals[2] >= 1.0


def test_gaussian_sum_value():
    assert riemann_sum(gauss(1, 100), 10) == pytest.approx(math.sqrt(math.pi * 1e3), rel=1e-14)


def test_stable_geometric_sum():
    q = math.exp(-0.1)
    assert riemann_sum(stable(1, 10, 1.0), 1) == pytest.approx((1 + q) / (1 - q), rel=1e-14)


@pytest.mark.parametrize(
    "cfg, j, expect",
    [(gauss(2, 1), 4, math.pi / 4), (stable(1, 1, 1.0), 2, 1.0), (stable(1, 1, 0.5), 1, 4.0)],
)
def test_integral_weight(cfg, j, expect):
    assert integral_weight(cfg, j) == pytest.approx(expect, rel=1e-14)


def test_delta_vanishes_for_fixed_j():
    vals = [delta_correction(gauss(2, L), 5) for L in (3, 6, 12)]
    assert vals[0] > vals[1] > vals[2] > 0
    assert vals[-1] < 1e-100


def test_delta_at_j_equal_L_squared():
    # j = L^2, d = 2: the lattice sum is (sum_k e^{-k^2})^2, the integral term pi
    theta3 = mpmath.jtheta(3, 0, mpmath.exp(-1))
    expect = float(theta3**2 - mpmath.pi)
    for L in (5, 20, 80):
        assert delta_correction(gauss(2, L), L * L) == pytest.approx(expect, rel=1e-10)


def test_stable_delta_slope():
    Ls = np.array([50, 100, 200, 400])
    ds = [delta_correction(stable(3, L, 1.0), 5) for L in Ls]
    slope = np.polyfit(np.log(Ls), np.log(ds), 1)[0]
    assert abs(slope - 1.0) < 0.1


@pytest.mark.parametrize("L", [1, 3, 10, 25, 50])
def test_poisson_identity(L):
    for j in range(1, 101):
        direct = riemann_sum(gauss(1, L), j, method="direct")
        assert poisson_dual_sum(gauss(1, L), j) == pytest.approx(direct, rel=1e-10)
    assert poisson_dual_sum(gauss(3, L), 7) == pytest.approx(riemann_sum(gauss(3, L), 7, method="direct"), rel=1e-10)


@pytest.mark.parametrize("L", [2, 5, 20])
@pytest.mark.parametrize("j", [1, 10, 100, 1000])
def test_dual_tail_bound(L, j):
    tail, bound = dual_tail_bound(gauss(1, L), j)
    assert tail <= bound


@pytest.mark.parametrize("cfg", [gauss(1, 7), gauss(3, 30), stable(2, 10, 1.0), stable(3, 20, 0.5), stable(1, 5, 1.7)])
def test_delta_nonnegative(cfg):
    # may underflow to zero when j << L**a
    for j in (1, 3, 10, 100, 1000):
        assert delta_correction(cfg, j) >= 0
    assert delta_correction(cfg, 10 * cfg.L**cfg.exponent) > 0


def test_universal_tail_decay():
    assert check_universal_tail(gauss(3, 1), [20, 40, 80])
    assert check_universal_tail(stable(2, 1, 1.0), [20, 40, 80])
    dev = tail_deviations(gauss(3, 1), [20, 40, 80])
    assert dev[-1] < 0.1


def test_j_equal_n_gaussian_high_dimension():
    # j = N = rho L^d with d = 3
    vals = [riemann_sum(gauss(3, L), L**3) for L in (4, 8, 16)]
    assert vals[0] > vals[1] > vals[2]
    # j / L^2 = 16 leaves (1 + 2 e^{-16})^3
    assert vals[-1] == pytest.approx((1 + 2 * math.exp(-16)) ** 3, rel=1e-12)


def test_heuristic_Theta_limits():
    assert heuristic_Theta(1e-3) == pytest.approx(1.0, abs=1e-12)
    assert heuristic_Theta(1e4) == pytest.approx(1e4, rel=1e-4)
    assert theta_shape(gauss(3, 1), heuristic_Theta(1e4)) == 0.0
    assert theta_shape(stable(3, 1, 1.0), 2.0) == 2.0


def test_heuristic_theta_monotone_gaussian_in_j():
    cfg = gauss(3, 10)
    vals = [heuristic_theta(cfg, j) for j in (1, 10, 100, 1000, 10000)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(math.exp(-1), rel=1e-3)


def test_grid_rows():
    rows = spatial_grid(stable(1, 1, 1.0), [10.0, 20.0], [1, 2])
    assert len(rows) == 4
    fam, d, g, L, j, s, integral, delta = rows[0]
    assert s - integral == pytest.approx(delta, rel=1e-12)


@pytest.mark.parametrize("kw", [dict(family="x"), dict(family="stable", gamma=2.0), dict(d=0), dict(L=-1.0)])
def test_config_validation(kw):
    with pytest.raises(DomainError):
        SpatialConfig(**kw)
