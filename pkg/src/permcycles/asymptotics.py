"""Regime classification, saddle-point roots and closed-form limits.

The regime is decided by b_1(R-) = g_kappa^{1}(R-): above one the saddle
point r_1 < R exists (subcritical), below one points condense into long
cycles (supercritical), and values within ``CRITICAL_TOL`` of one are
treated as critical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ._roots import increasing_root
from .errors import ConfigurationError, DomainError, UnsupportedRegimeError
from .specialfn import gamma_real, log_gamma_real
from .weights import WeightModel

__all__ = [
    "CRITICAL_TOL",
    "LawTag",
    "RegimeReport",
    "CycleLimit",
    "AsymptoticValue",
    "b1",
    "b2",
    "solve_r_v",
    "classify",
    "critical_density",
    "limiting_cycle_fraction",
    "asymptotic_log_HN",
    "tn_limit_params",
    "sample_tn_limit",
    "nu_tilde_K",
]

CRITICAL_TOL = 1e-9
SUBCRITICAL = "Subcritical"
CRITICAL = "Critical"
SUPERCRITICAL = "Supercritical"


@dataclass(frozen=True)
class LawTag:
    """Name of an applicable limit law with its constants.

    ``name`` is ``"unsupported"`` (with a ``reason`` parameter) when no
    closed form applies.
    """

    name: str
    params: dict = field(default_factory=dict)

    @property
    def supported(self) -> bool:
        return self.name != "unsupported"


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    radius: float
    r_star: float
    r_1: Optional[float]
    b1_at: float
    b2_at: float
    b1_at_R: float
    nu_tilde: float
    rho_crit: float
    theta_star: float
    hn_law: LawTag
    tn_law: LawTag

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "radius": self.radius,
            "r_star": self.r_star,
            "r_1": self.r_1,
            "b1_at": self.b1_at,
            "b2_at": self.b2_at,
            "b1_at_R": self.b1_at_R,
            "nu_tilde": self.nu_tilde,
            "rho_crit": self.rho_crit,
            "theta_star": self.theta_star,
            "hn_law": {"name": self.hn_law.name, **self.hn_law.params},
            "tn_law": {"name": self.tn_law.name, **self.tn_law.params},
        }


class CycleLimit(NamedTuple):
    """Limit of C_j: ``kind`` is "fraction" (C_j/N -> value), "poisson"
    (C_j -> Poisson(value)) or "zero"."""

    kind: str
    value: float


class AsymptoticValue(NamedTuple):
    log_value: float
    law: LawTag


def b1(model: WeightModel, r: float) -> float:
    """b_1(r) = g_kappa^{1}(r)."""
    return model.gk(1, r)


def b2(model: WeightModel, r: float) -> float:
    """b_2(r) = g_kappa^{1}(r) + g_kappa^{2}(r)."""
    return model.gk(1, r) + model.gk(2, r)


def _radius_and_b1R(model: WeightModel) -> tuple:
    prof = model.require_profile()
    R = prof.radius
    if math.isinf(R):
        b1R = math.inf if any(model.kappa.table) else 0.0
    else:
        b1R = prof.gk_at_R[1]
    return R, b1R


def solve_r_v(model: WeightModel, v: float) -> float:
    """Root r_v of g_kappa^{1}(r) = 1/v on (0, R]."""
    if not v > 0:
        raise DomainError("v must be positive")
    R, b1R = _radius_and_b1R(model)
    target = 1.0 / v
    if math.isfinite(b1R):
        if abs(v * b1R - 1.0) <= 1e-12:
            return R
        if target > b1R:
            raise DomainError(
                f"no root: 1/v = {target!r} exceeds g_kappa^{{1}}(R-) = {b1R!r} "
                "(supercritical condition for this v)"
            )
    f = lambda r: model.gk(1, r)
    df = lambda r: (model.gk(1, r) + model.gk(2, r)) / r if r > 0 else 0.0
    if math.isinf(R):
        hi = 1.0
        for _ in range(200):
            if f(hi) >= target:
                break
            hi *= 2.0
        else:
            raise DomainError("failed to bracket r_v")
    else:
        hi = R * (1.0 - 1e-12)
        if f(hi) < target:
            # root lies within the final 1e-12 of the radius
            return R
    lo = 1e-8
    for _ in range(200):
        if f(lo) <= target:
            break
        lo *= 0.5
    else:
        raise DomainError("failed to bracket r_v from below")
    return increasing_root(f, target, lo, hi, df=df, rtol=1e-13)


def critical_density(model: WeightModel) -> float:
    """rho_c = sum_j base_kappa_j R^j (+inf when divergent)."""
    base = model.with_density(1.0)
    R, b1R = _radius_and_b1R(base)
    return b1R


def _hn_law(model: WeightModel, regime: str, R: float, r1: Optional[float], b1R: float) -> LawTag:
    prof = model.require_profile()
    ts = prof.theta_star
    reg = prof.gt_regular_at_R
    if regime == SUBCRITICAL:
        return LawTag(
            "subcritical-saddle",
            {"r_1": r1, "g_theta": model.gt(r1), "g_kappa": model.gk(0, r1), "b_2": b2(model, r1)},
        )
    gkR = prof.gk_at_R[0]
    s = prof.sing_index
    if regime == SUPERCRITICAL:
        if ts > 0:
            return LawTag(
                "supercritical-log",
                {"theta_star": ts, "g_kappa_R": gkR, "b1_R": b1R, "radius": R, "g_theta_regular_R": reg},
            )
        if s is None or s == math.floor(s) or prof.sing_coeff is None:
            return LawTag("unsupported", {"reason": "theta_star = 0 needs a non-integer singularity index"})
        if not prof.gt_analytic_at_R:
            return LawTag("unsupported", {"reason": "theta_star = 0 needs g_theta analytic at R"})
        return LawTag(
            "supercritical-power",
            {"g_theta_R": prof.gt_value_at_R, "g_kappa_R": gkR, "b1_R": b1R, "a_s": prof.sing_coeff,
             "s": s, "radius": R},
        )
    g2R = prof.gk_at_R[2]
    if 0 < g2R < math.inf:
        b2R = b1R + g2R
        if ts == 0 and math.isfinite(prof.gt_value_at_R):
            return LawTag(
                "critical-gaussian",
                {"g_theta_R": prof.gt_value_at_R, "g_kappa_R": gkR, "b_2": b2R, "radius": R},
            )
        return LawTag(
            "critical-half-normal",
            {"theta_star": ts, "g_kappa_R": gkR, "b_2": b2R, "radius": R, "g_theta_regular_R": reg},
        )
    if s is not None and 1 < s < 2 and prof.sing_coeff is not None:
        return LawTag(
            "critical-stable",
            {"theta_star": ts, "g_kappa_R": gkR, "a_s": prof.sing_coeff, "s": s, "radius": R,
             "g_theta_regular_R": reg},
        )
    return LawTag("unsupported", {"reason": "critical regime without finite g_kappa^{2}(R) or s in (1,2)"})


def _tn_law(model: WeightModel, regime: str, hn: LawTag, r_star: float) -> LawTag:
    if not hn.supported:
        return LawTag("unsupported", dict(hn.params))
    g = model.gk(0, r_star) if regime == SUBCRITICAL else hn.params["g_kappa_R"]
    if hn.name == "subcritical-saddle":
        bb = hn.params["b_2"]
        return LawTag("a", {"mean_slope": g, "var_slope": g - 1.0 / bb})
    if hn.name in ("supercritical-log", "supercritical-power"):
        return LawTag("b", {"mean_slope": g, "var_slope": g})
    if hn.name == "critical-gaussian" and model.require_profile().theta_star == 0:
        bb = hn.params["b_2"]
        return LawTag("c-i", {"mean_slope": g, "var_slope": g - 1.0 / bb})
    if hn.name == "critical-stable":
        return LawTag("c-ii", {"mean_slope": g, "var_slope": g})
    ts = hn.params["theta_star"]
    bb = hn.params["b_2"]
    skew = math.sqrt(2.0 / (g * bb - 1.0))
    mean = -skew * math.exp(log_gamma_real((ts + 1.0) / 2.0) - log_gamma_real(ts / 2.0)) if ts > 0 else 0.0
    if ts == 0:
        return LawTag("c-i", {"mean_slope": g, "var_slope": g - 1.0 / bb})
    return LawTag(
        "c-iii",
        {"mean_slope": g, "var_slope": g - 1.0 / bb, "skew_coeff": skew, "gamma_shape": ts / 2.0,
         "limit_mean": mean},
    )


def classify(model: WeightModel) -> RegimeReport:
    """Classify the regime and attach the applicable H_N and T_N laws."""
    model.check_asymptotic_assumptions()
    prof = model.require_profile()
    R, b1R = _radius_and_b1R(model)
    if abs(b1R - 1.0) <= CRITICAL_TOL:
        regime = CRITICAL
    elif b1R > 1.0:
        regime = SUBCRITICAL
    else:
        regime = SUPERCRITICAL
    if regime == SUBCRITICAL:
        r1 = solve_r_v(model, 1.0)
        r_star = r1
    elif regime == CRITICAL:
        r1 = R
        r_star = R
    else:
        r1 = None
        r_star = R
    if regime == SUBCRITICAL:
        b1_at = b1(model, r_star)
        b2_at = b2(model, r_star)
    else:
        b1_at = b1R
        b2_at = b1R + prof.gk_at_R[2]
    nu = 1.0 - b1R if regime == SUPERCRITICAL else 0.0
    hn = _hn_law(model, regime, R, r1, b1R)
    tn = _tn_law(model, regime, hn, r_star)
    return RegimeReport(
        regime=regime,
        radius=R,
        r_star=r_star,
        r_1=r1,
        b1_at=b1_at,
        b2_at=b2_at,
        b1_at_R=b1R,
        nu_tilde=nu,
        rho_crit=critical_density(model),
        theta_star=prof.theta_star,
        hn_law=hn,
        tn_law=tn,
    )


def limiting_cycle_fraction(model: WeightModel, j: int, report: Optional[RegimeReport] = None) -> CycleLimit:
    """Limit of C_j/N (kappa_j > 0), or the Poisson rate of C_j (kappa_j = 0 < theta_j)."""
    if j < 1:
        raise DomainError("j must be >= 1")
    rep = classify(model) if report is None else report
    r = rep.r_star
    k = model.kappa_j(j)
    if k > 0:
        return CycleLimit("fraction", k * r**j / j)
    t = model.theta_j(j)
    if t > 0:
        return CycleLimit("poisson", t * r**j / j)
    return CycleLimit("zero", 0.0)


def asymptotic_log_HN(model: WeightModel, n_points: int, report: Optional[RegimeReport] = None) -> AsymptoticValue:
    """Logarithm of the leading-order asymptotic form of H_N."""
    rep = classify(model) if report is None else report
    law = rep.hn_law
    p = law.params
    N = float(n_points)
    if law.name == "subcritical-saddle":
        r = p["r_1"]
        val = p["g_theta"] + N * p["g_kappa"] - N * math.log(r) - 0.5 * math.log(2 * math.pi * N * p["b_2"])
    elif law.name == "supercritical-log":
        ts = p["theta_star"]
        val = (
            N * p["g_kappa_R"] + p["g_theta_regular_R"] + (ts - 1.0) * math.log(N * (1.0 - p["b1_R"]))
            - N * math.log(p["radius"]) - log_gamma_real(ts)
        )
    elif law.name == "supercritical-power":
        s = p["s"]
        gap = 1.0 - p["b1_R"]
        ratio = p["a_s"] / gamma_real(-s)
        if ratio <= 0:
            raise UnsupportedRegimeError("singular coefficient has the wrong sign")
        val = (
            p["g_theta_R"] + N * p["g_kappa_R"] + math.log(ratio) - s * math.log(N * gap)
            - math.log(gap) - N * math.log(p["radius"])
        )
    elif law.name == "critical-gaussian":
        val = (
            p["g_theta_R"] + N * p["g_kappa_R"] - N * math.log(p["radius"])
            - 0.5 * math.log(2 * math.pi * N * p["b_2"])
        )
    elif law.name == "critical-half-normal":
        ts = p["theta_star"]
        val = (
            N * p["g_kappa_R"] + p["g_theta_regular_R"] + 0.5 * (ts - 1.0) * math.log(0.5 * N * p["b_2"])
            - math.log(2.0) - N * math.log(p["radius"]) - log_gamma_real((1.0 + ts) / 2.0)
        )
    elif law.name == "critical-stable":
        ts = p["theta_star"]
        s = p["s"]
        val = (
            N * p["g_kappa_R"] + p["g_theta_regular_R"] + (ts - 1.0) / s * math.log(N * p["a_s"])
            - math.log(s) - N * math.log(p["radius"]) - log_gamma_real((s - 1.0 + ts) / s)
        )
    else:
        raise UnsupportedRegimeError(f"no H_N law for this model: {p.get('reason', law.name)}")
    return AsymptoticValue(val, law)


def tn_limit_params(model: WeightModel, report: Optional[RegimeReport] = None) -> LawTag:
    """Centering, scaling and limit shape of the total cycle count T_N."""
    rep = classify(model) if report is None else report
    if not rep.tn_law.supported:
        raise UnsupportedRegimeError(f"no T_N law for this model: {rep.tn_law.params.get('reason')}")
    return rep.tn_law


def sample_tn_limit(law: LawTag, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draws from the standardized T_N limit: N(0,1), or Z - c sqrt(X) with X ~ Gamma(shape)."""
    z = rng.standard_normal(size)
    if law.name != "c-iii":
        return z
    x = rng.gamma(law.params["gamma_shape"], 1.0, size)
    return z - law.params["skew_coeff"] * np.sqrt(x)


def nu_tilde_K(model: WeightModel, k: int, report: Optional[RegimeReport] = None) -> float:
    """1 - sum_{j<=K} kappa_j r_*^j."""
    if k < 0:
        raise DomainError("K must be >= 0")
    if k == 0:
        return 1.0
    rep = classify(model) if report is None else report
    r = rep.r_star
    kap = model.kappa_values(k)
    j = np.arange(1, k + 1)
    return 1.0 - math.fsum(kap * r**j)
