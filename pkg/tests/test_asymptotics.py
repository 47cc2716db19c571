import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permcycles.asymptotics import (
    LawTag,
    asymptotic_log_HN,
    classify,
    critical_density,
    limiting_cycle_fraction,
    nu_tilde_K,
    sample_tn_limit,
    solve_r_v,
    tn_limit_params,
)
from permcycles.errors import DomainError, UnsupportedRegimeError
from permcycles.series import log_partition
from permcycles.specialfn import zeta_real
from permcycles.weights import SequenceRule, WeightModel, constant_model, g_kappa, g_kappa_mod_deriv, polylog_model


@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0))
@settings(max_examples=50, deadline=None)
def test_r_v_constant_closed_form(kstar, v):
    m = constant_model(1.0, kstar)
    r = solve_r_v(m, v)
    assert r == pytest.approx(1.0 / (v * kstar + 1.0), rel=1e-12)
    assert abs(v * g_kappa_mod_deriv(m, 1, r) - 1.0) < 1e-12


def test_r_v_polylog_s1():
    assert solve_r_v(polylog_model(1.0, 1.0), 2.0) == pytest.approx(1 - math.exp(-0.5), rel=1e-13)


def test_r_v_boundary_returns_radius():
    m = polylog_model(2.0, 0.5)
    v = 1.0 / (0.5 * zeta_real(2.0))
    assert solve_r_v(m, v) == 1.0


def test_r_v_no_root_names_condition():
    m = polylog_model(2.0, 0.5)
    with pytest.raises(DomainError, match="supercritical"):
        solve_r_v(m, 1.0)


@given(st.floats(1.0, 50.0), st.floats(1.0, 50.0))
@settings(max_examples=40, deadline=None)
def test_r_v_decreasing_in_v(v1, v2):
    m = polylog_model(1.5, 1.0)
    lo, hi = sorted((v1, v2))
    if hi - lo < 1e-6:
        return
    assert solve_r_v(m, hi) < solve_r_v(m, lo)
    for v in (lo, hi):
        assert abs(v * g_kappa_mod_deriv(m, 1, solve_r_v(m, v)) - 1.0) < 1e-12


def test_r_v_entire_kappa():
    m = WeightModel(SequenceRule("table", table=(1.0,)), SequenceRule("table", table=(0.0, 1.0, 1.0)))
    r = solve_r_v(m, 1.0)
    assert r * r + r**3 == pytest.approx(1.0, rel=1e-13)


@pytest.mark.parametrize("tk", [(0.5, 1.0), (1.0, 1.0), (3.0, 0.2)])
def test_constant_always_subcritical(tk):
    rep = classify(constant_model(*tk))
    assert rep.regime == "Subcritical"
    assert rep.r_star == pytest.approx(1 / (tk[1] + 1), rel=1e-13)
    assert rep.nu_tilde == 0.0


def test_supercritical_reference(supercritical):
    rep = classify(supercritical)
    assert rep.regime == "Supercritical"
    assert rep.r_star == 1.0 and rep.r_1 is None
    assert rep.nu_tilde == pytest.approx(0.5, abs=1e-12)
    assert rep.tn_law.name == "b"


def test_critical_reference(critical):
    rep = classify(critical)
    assert rep.regime == "Critical"
    assert rep.nu_tilde == 0.0
    assert rep.hn_law.name == "critical-half-normal"
    assert rep.tn_law.name == "c-iii"


def test_critical_density_examples():
    assert critical_density(constant_model()) == math.inf
    assert critical_density(polylog_model(2.0, 1.0)) == pytest.approx(math.pi**2 / 6, rel=1e-12)
    assert critical_density(polylog_model(1.5, 1.0)) == pytest.approx(2.6123753486854883, rel=1e-12)


def test_limiting_fraction_constant(const11):
    lim = limiting_cycle_fraction(const11, 1)
    assert lim.kind == "fraction" and lim.value == pytest.approx(0.5, rel=1e-14)


def test_limiting_fraction_poisson_case():
    m = WeightModel(SequenceRule("table", table=(2.0,)), SequenceRule("table", table=(0.0, 1.0, 1.0)))
    r = classify(m).r_star
    lim = limiting_cycle_fraction(m, 1)
    assert lim.kind == "poisson" and lim.value == pytest.approx(2.0 * r, rel=1e-14)
    total = sum(limiting_cycle_fraction(m, j).value for j in (2, 3))
    assert total == pytest.approx(g_kappa(m, r), rel=1e-14)


def test_fractions_sum_to_g_kappa(const11):
    total = math.fsum(limiting_cycle_fraction(const11, j).value for j in range(1, 80))
    assert total == pytest.approx(math.log(2), rel=1e-14)


def test_constant_hn_matches_stirling_form(const11):
    n = 1000
    ts, ks = 1.0, 1.0
    stirling = (-0.5 * math.log(2 * math.pi * n) + (ts + n * ks - 0.5) * math.log((ks + 1) / ks)
                + n * math.log(ks + 1))
    val = asymptotic_log_HN(const11, n).log_value
    assert val == pytest.approx(stirling, rel=1e-12)
    assert math.exp(val - log_partition(const11, n)) == pytest.approx(1.0, abs=2e-3)


def test_supercritical_hn_reduces_to_exponential(supercritical):
    n = 700
    av = asymptotic_log_HN(supercritical, n)
    assert av.law.name == "supercritical-log"
    assert av.log_value == pytest.approx(n * g_kappa(supercritical, 1.0), rel=1e-13)


def test_critical_theta_zero_laws_agree():
    m = polylog_model(2.5, 1.0 / zeta_real(2.5), theta=0.0)
    rep = classify(m)
    assert rep.hn_law.name == "critical-gaussian"
    p = dict(rep.hn_law.params)
    half = LawTag("critical-half-normal", {"theta_star": 0.0, "g_kappa_R": p["g_kappa_R"], "b_2": p["b_2"],
                                           "radius": 1.0, "g_theta_regular_R": 0.0})
    other = dataclasses.replace(rep, hn_law=half)
    for n in (10, 1000):
        assert asymptotic_log_HN(m, n, other).log_value == pytest.approx(asymptotic_log_HN(m, n, rep).log_value,
                                                                         rel=1e-13)


@pytest.mark.parametrize(
    "model",
    [
        polylog_model(2.5, 1.0 / zeta_real(2.5)),
        polylog_model(2.5, 1.0 / zeta_real(2.5), theta=0.0),
        polylog_model(1.5, 1.0 / zeta_real(1.5)),
        polylog_model(1.5, 0.5 / zeta_real(1.5), theta=0.0),
        polylog_model(2.0, 0.5 / zeta_real(2.0), theta=2.0),
    ],
    ids=["critical-half-normal", "critical-gaussian", "critical-stable", "supercritical-power", "supercritical-log"],
)
def test_laws_converge_to_exact(model):
    errs = [abs(asymptotic_log_HN(model, n).log_value - log_partition(model, n)) for n in (256, 1024, 4096)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.04


@pytest.mark.parametrize(
    "model",
    [polylog_model(2.0, 1.0 / zeta_real(2.0)), __import__("permcycles").giant_cycle_model()],
    ids=["critical-integer-s", "supercritical-theta0-integer-s"],
)
def test_unsupported_regimes(model):
    with pytest.raises(UnsupportedRegimeError):
        asymptotic_log_HN(model, 100)
    with pytest.raises(UnsupportedRegimeError):
        tn_limit_params(model)


def test_tn_params_constant(const11):
    law = tn_limit_params(const11)
    assert law.name == "a"
    assert law.params["mean_slope"] == pytest.approx(math.log(2), rel=1e-14)
    assert law.params["var_slope"] == pytest.approx(math.log(2) - 0.5, rel=1e-13)


def test_tn_params_supercritical(supercritical):
    p = tn_limit_params(supercritical).params
    assert p["var_slope"] == p["mean_slope"] == pytest.approx(g_kappa(supercritical, 1.0), rel=1e-14)


def test_tn_c_iii_limit_mean(critical, rng):
    law = tn_limit_params(critical)
    g, b2 = law.params["mean_slope"], classify(critical).b2_at
    expect = -math.sqrt(2 / (g * b2 - 1)) * math.gamma(1.0) / math.gamma(0.5)
    assert law.params["limit_mean"] == pytest.approx(expect, rel=1e-13)
    z = sample_tn_limit(law, 400_000, rng)
    assert abs(z.mean() - expect) < 4 * z.std() / math.sqrt(z.size)


def test_nu_tilde_K_examples(supercritical, const11):
    assert nu_tilde_K(supercritical, 0) == 1.0
    assert nu_tilde_K(supercritical, 100_000) == pytest.approx(0.5, abs=1e-5)
    assert nu_tilde_K(const11, 60) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("k", [0, 1, 5, 40])
def test_nu_tilde_K_increment(supercritical, k):
    d = nu_tilde_K(supercritical, k) - nu_tilde_K(supercritical, k + 1)
    assert d == pytest.approx(supercritical.kappa_j(k + 1), rel=1e-12)
    assert d >= 0


def test_density_monotonicity():
    base = polylog_model(2.0, 1.0)
    rc = critical_density(base)
    grid = [rc * f for f in np.linspace(0.3, 3.0, 25)]
    vals = []
    for rho in grid:
        m = base.with_density(rho)
        vals.append(g_kappa(m, classify(m).r_star))
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_threshold_nondecreasing_in_density():
    base = polylog_model(2.0, 1.0)
    rc = critical_density(base)
    vals = []
    for rho in np.linspace(0.2, 0.95, 16) * rc:
        m = base.with_density(rho)
        vals.append(1.0 + g_kappa_mod_deriv(m, 2, classify(m).r_star))
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_density_flip():
    base = polylog_model(2.0, 1.0)
    rc = critical_density(base)
    regimes = [classify(base.with_density(rc * f)).regime for f in (0.5, 0.999, 1.001, 2.0)]
    assert regimes == ["Subcritical", "Subcritical", "Supercritical", "Supercritical"]
    assert classify(base.with_density(rc)).regime == "Critical"
