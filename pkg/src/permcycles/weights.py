"""Cycle-weight families w_j(N) = theta_j + N * kappa_j and their
generating-function profiles.

A :class:`WeightModel` pairs two coefficient rules (for theta and for the
base kappa) with a density ``rho`` dividing kappa. Rules of the constant,
power and perturbed kinds have closed-form generating functions through the
polylogarithm, which also lets the singularity profile at the radius of
convergence be derived automatically. Explicit tables are polynomials.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, ModelParseError
from .specialfn import gamma_real, polylog, zeta_real

__all__ = [
    "SequenceRule",
    "GenFnProfile",
    "WeightModel",
    "weight",
    "weights_array",
    "g_theta",
    "g_kappa",
    "g_kappa_mod_deriv",
    "model_from_dict",
    "model_to_dict",
    "load_model",
    "dumps_model",
    "constant_model",
    "polylog_model",
    "giant_cycle_model",
]

KINDS = ("constant", "power", "perturbed", "table")


@dataclass(frozen=True)
class SequenceRule:
    """Coefficient rule a_j, j >= 1.

    constant:  a_j = coeff
    power:     a_j = coeff * j**(-exponent)
    perturbed: a_j = coeff * (1 + j**(-eps)) * j**(-exponent)
    table:     a_j = table[j-1] for j <= len(table), zero beyond
    """

    kind: str
    coeff: float = 0.0
    exponent: float = 0.0
    eps: float = 0.0
    table: tuple = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ModelParseError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "table":
            if any((not math.isfinite(v)) or v < 0 for v in self.table):
                raise ModelParseError("table entries must be finite and nonnegative")
        else:
            if not math.isfinite(self.coeff) or self.coeff < 0:
                raise ModelParseError("coefficient must be finite and nonnegative")
        if self.kind == "perturbed" and self.eps <= 0:
            raise ModelParseError("perturbation exponent eps must be positive")

    def values(self, n: int) -> np.ndarray:
        """Array (a_1, ..., a_n)."""
        j = np.arange(1, n + 1, dtype=np.float64)
        if self.kind == "constant":
            return np.full(n, float(self.coeff))
        if self.kind == "power":
            return self.coeff * j ** (-self.exponent)
        if self.kind == "perturbed":
            return self.coeff * (1.0 + j ** (-self.eps)) * j ** (-self.exponent)
        out = np.zeros(n)
        m = min(n, len(self.table))
        out[:m] = self.table[:m]
        return out

    def value(self, j: int) -> float:
        if j < 1:
            raise DomainError("index j must be >= 1")
        if self.kind == "table":
            return float(self.table[j - 1]) if j <= len(self.table) else 0.0
        return float(self.values(j)[-1])

    @property
    def is_zero(self) -> bool:
        if self.kind == "table":
            return not any(self.table)
        return self.coeff == 0.0

    def power_terms(self) -> list:
        """The rule as a sum of c * j**(-a) terms, [(c, a), ...] (families only)."""
        if self.kind == "constant":
            return [(self.coeff, 0.0)]
        if self.kind == "power":
            return [(self.coeff, self.exponent)]
        if self.kind == "perturbed":
            return [(self.coeff, self.exponent), (self.coeff, self.exponent + self.eps)]
        raise ValueError("tables have no power representation")


@dataclass(frozen=True)
class GenFnProfile:
    """Behaviour of g_theta and g_kappa at their common radius R.

    ``gk_at_R`` holds g_kappa^{n}(R-) for n = 0, 1, 2 (``inf`` if divergent).
    ``gt_regular_at_R`` is the limit of g_theta(z) + theta_star*log(1 - z/R)
    as z -> R, and ``gt_analytic_at_R`` records whether g_theta extends
    analytically across R.
    """

    radius: float
    theta_star: float
    sing_index: Optional[float]
    sing_coeff: Optional[float]
    gk_at_R: tuple
    gt_value_at_R: float
    gt_regular_at_R: float
    gt_analytic_at_R: bool

    def to_dict(self) -> dict:
        return {
            "radius": _enc(self.radius),
            "theta_star": self.theta_star,
            "sing_index": self.sing_index,
            "sing_coeff": self.sing_coeff,
            "gk_derivs_at_R": [_enc(v) for v in self.gk_at_R],
            "gt_value_at_R": _enc(self.gt_value_at_R),
            "gt_regular_at_R": _enc(self.gt_regular_at_R),
            "gt_analytic_at_R": self.gt_analytic_at_R,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenFnProfile":
        try:
            gk = tuple(_dec(v) for v in d["gk_derivs_at_R"])
            gk = gk + (math.inf,) * (3 - len(gk))
            theta_star = float(d.get("theta_star", 0.0))
            gt_val = _dec(d.get("gt_value_at_R", "inf" if theta_star > 0 else 0.0))
            return cls(
                radius=_dec(d["radius"]),
                theta_star=theta_star,
                sing_index=None if d.get("sing_index") is None else float(d["sing_index"]),
                sing_coeff=None if d.get("sing_coeff") is None else float(d["sing_coeff"]),
                gk_at_R=gk[:3],
                gt_value_at_R=gt_val,
                gt_regular_at_R=_dec(d.get("gt_regular_at_R", gt_val if theta_star == 0 else 0.0)),
                gt_analytic_at_R=bool(d.get("gt_analytic_at_R", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelParseError(f"invalid profile: {exc}") from exc


def _enc(x: float) -> Any:
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _dec(x: Any) -> float:
    if isinstance(x, str):
        if x in ("inf", "+inf", "Infinity"):
            return math.inf
        if x in ("-inf", "-Infinity"):
            return -math.inf
        raise ValueError(f"unexpected string {x!r}")
    return float(x)


def _stirling1_row(n: int) -> list:
    """Signed Stirling numbers of the first kind s(n, k), k = 0..n."""
    row = [1]
    for m in range(n):
        new = [0] * (m + 2)
        for k, c in enumerate(row):
            new[k + 1] += c
            new[k] -= m * c
        row = new
    return row


def _family_gen(rule: SequenceRule, n: int, r: float, scale: float = 1.0) -> float:
    """sum_j (j-1)_{n-1} a_j r^j for n >= 1, or sum_j a_j r^j / j for n = 0.

    Closed forms: power terms c*j^-a give c*Li_{a+1} (n = 0) and
    c * sum_k s(n,k) Li_{a+1-k} (n >= 1); the constant rule uses
    c*(n-1)! (r/(1-r))^n directly.
    """
    if rule.is_zero:
        return 0.0
    if rule.kind == "constant":
        c = rule.coeff * scale
        if n == 0:
            return math.inf if r >= 1.0 else -c * math.log1p(-r)
        if r >= 1.0:
            return math.inf
        return c * math.factorial(n - 1) * (r / (1.0 - r)) ** n
    total = 0.0
    for c, a in rule.power_terms():
        c *= scale
        if n == 0:
            total += c * polylog(a + 1.0, r)
            continue
        row = _stirling1_row(n)
        # the most singular polylog carries coefficient s(n,n) = 1 > 0
        if r >= 1.0 and a + 1.0 - n <= 1.0:
            return math.inf
        total += c * math.fsum(row[k] * polylog(a + 1.0 - k, r) for k in range(1, n + 1))
    return total


def _table_gen(values: Sequence[float], n: int, r: float, scale: float = 1.0) -> float:
    if r == math.inf:
        return math.inf if any(values) else 0.0
    terms = []
    for j, a in enumerate(values, start=1):
        if a == 0.0:
            continue
        if n == 0:
            terms.append(a * r**j / j)
        else:
            ff = 1.0
            for i in range(1, n):
                ff *= j - i
            terms.append(ff * a * r**j)
    return scale * math.fsum(terms)


@dataclass(frozen=True)
class WeightModel:
    """Weight model with theta rule, base kappa rule and density rho.

    The effective kappa_j is ``kappa_rule.value(j) / rho``.
    """

    theta: SequenceRule
    kappa: SequenceRule
    rho: float = 1.0
    profile_override: Optional[GenFnProfile] = field(default=None, compare=True)

    def __post_init__(self) -> None:
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ModelParseError("density rho must be positive and finite")

    # sequences -------------------------------------------------------
    def theta_values(self, n: int) -> np.ndarray:
        return self.theta.values(n)

    def kappa_values(self, n: int) -> np.ndarray:
        return self.kappa.values(n) / self.rho

    def theta_j(self, j: int) -> float:
        return self.theta.value(j)

    def kappa_j(self, j: int) -> float:
        return self.kappa.value(j) / self.rho

    def with_density(self, rho: float) -> "WeightModel":
        return replace(self, rho=float(rho), profile_override=None)

    # generating functions --------------------------------------------
    def _gen(self, rule: SequenceRule, n: int, r: float, scale: float) -> float:
        if rule.kind == "table":
            return _table_gen(rule.table, n, r, scale)
        return _family_gen(rule, n, r, scale)

    def gt(self, r: float) -> float:
        return self._gen(self.theta, 0, r, 1.0)

    def gk(self, n: int, r: float) -> float:
        return self._gen(self.kappa, n, r, 1.0 / self.rho)

    # profile ---------------------------------------------------------
    @cached_property
    def profile(self) -> Optional[GenFnProfile]:
        """Singularity profile, derived for families or taken from the override."""
        if self.profile_override is not None:
            return self.profile_override
        return _derive_profile(self)

    def require_profile(self) -> GenFnProfile:
        prof = self.profile
        if prof is None:
            raise ConfigurationError(
                "no generating-function profile: supply one for explicit tables "
                "mixed with infinite families"
            )
        return prof

    def check_asymptotic_assumptions(self, horizon: int = 64) -> None:
        """Require some kappa_j > 0 with j >= 2 and non-arithmetic support."""
        k = self.kappa_values(horizon)
        support = [j for j in range(1, horizon + 1) if k[j - 1] > 0]
        if not any(j >= 2 for j in support):
            raise ConfigurationError("asymptotics need kappa_j > 0 for some j >= 2")
        g = 0
        for j in support:
            g = math.gcd(g, j)
        if g != 1:
            raise ConfigurationError(f"kappa support is arithmetic with span {g}")


def _theta_profile(rule: SequenceRule) -> tuple:
    """(theta_star, value at 1, regular part at 1, analytic at 1) for R = 1."""
    if rule.is_zero:
        return 0.0, 0.0, 0.0, True
    if rule.kind == "table":
        val = _table_gen(rule.table, 0, 1.0)
        return 0.0, val, val, True
    theta_star = 0.0
    regular = 0.0
    for c, a in rule.power_terms():
        if a == 0.0:
            theta_star += c
        elif a > 0.0:
            regular += c * zeta_real(a + 1.0)
        else:
            return math.inf, math.inf, math.inf, False
    value = math.inf if theta_star > 0 else regular
    return theta_star, value, regular, False


def _derive_profile(model: WeightModel) -> Optional[GenFnProfile]:
    th, ka = model.theta, model.kappa
    if ka.kind == "table":
        if th.kind != "table" and not th.is_zero:
            return None
        gk = tuple(_table_gen(ka.table, n, math.inf) for n in range(3))
        return GenFnProfile(
            radius=math.inf,
            theta_star=0.0,
            sing_index=None,
            sing_coeff=None,
            gk_at_R=gk,
            gt_value_at_R=math.inf if not th.is_zero else 0.0,
            gt_regular_at_R=0.0,
            gt_analytic_at_R=True,
        )
    scale = 1.0 / model.rho
    gk = tuple(_family_gen(ka, n, 1.0, scale) for n in range(3))
    sing_index = None
    sing_coeff = None
    if ka.kind in ("power", "perturbed") and ka.exponent > 1.0 and not ka.is_zero:
        sing_index = float(ka.exponent)
        if sing_index != math.floor(sing_index):
            sing_coeff = ka.coeff * scale * gamma_real(-sing_index)
    theta_star, gt_val, gt_reg, analytic = _theta_profile(th)
    if not math.isfinite(theta_star):
        return None
    return GenFnProfile(
        radius=1.0,
        theta_star=theta_star,
        sing_index=sing_index,
        sing_coeff=sing_coeff,
        gk_at_R=gk,
        gt_value_at_R=gt_val,
        gt_regular_at_R=gt_reg,
        gt_analytic_at_R=analytic,
    )


# public operations ----------------------------------------------------


def weight(model: WeightModel, j: int, n_points: int) -> float:
    """w_j(N) = theta_j + N * kappa_j."""
    if j < 1 or n_points < 1:
        raise DomainError("weight requires j >= 1 and N >= 1")
    return model.theta_j(j) + n_points * model.kappa_j(j)


def weights_array(model: WeightModel, n_points: int, n: int) -> np.ndarray:
    """Array (w_1(N), ..., w_n(N))."""
    return model.theta_values(n) + n_points * model.kappa_values(n)


def _radius(model: WeightModel) -> float:
    prof = model.profile
    if prof is not None:
        return prof.radius
    return 1.0 if model.kappa.kind != "table" or model.theta.kind != "table" else math.inf


def _check_arg(model: WeightModel, r: float, allow_inf: bool, value: float) -> float:
    if math.isinf(value) and not allow_inf:
        raise DomainError(f"generating function diverges at r = {r!r}")
    return value


def _domain(model: WeightModel, r: float) -> None:
    R = _radius(model)
    if not (0.0 <= r <= R) or (math.isinf(r) and not math.isinf(R)):
        raise DomainError(f"r = {r!r} outside [0, R] with R = {R!r}")


def g_theta(model: WeightModel, r: float, allow_inf: bool = False) -> float:
    """g_theta(r) = sum_j theta_j r^j / j."""
    _domain(model, r)
    return _check_arg(model, r, allow_inf, model.gt(r))


def g_kappa(model: WeightModel, r: float, allow_inf: bool = False) -> float:
    """g_kappa(r) = sum_j kappa_j r^j / j."""
    _domain(model, r)
    return _check_arg(model, r, allow_inf, model.gk(0, r))


def g_kappa_mod_deriv(model: WeightModel, n: int, r: float, allow_inf: bool = False) -> float:
    """Modified derivative r^n g_kappa^(n)(r) = sum_j (j-1)_{n-1} kappa_j r^j."""
    if n < 0:
        raise DomainError("derivative order must be >= 0")
    _domain(model, r)
    return _check_arg(model, r, allow_inf, model.gk(n, r))


# JSON -----------------------------------------------------------------


def _rule_from_dict(d: dict, role: str) -> SequenceRule:
    if not isinstance(d, dict) or "kind" not in d:
        raise ModelParseError(f"{role}: expected an object with a 'kind' field")
    kind = d["kind"]
    coeff_key = "kstar" if role == "kappa" else "c"
    exp_key = "s" if role == "kappa" else "gamma0"
    try:
        if kind == "table":
            return SequenceRule("table", table=tuple(float(v) for v in d["values"]))
        if kind == "polylog":
            kind = "power"
        coeff = float(d.get(coeff_key, d.get("c", d.get("kstar", 1.0))))
        exponent = float(d.get(exp_key, d.get("s", d.get("gamma0", 0.0))))
        if kind == "constant":
            return SequenceRule("constant", coeff=coeff)
        if kind == "power":
            return SequenceRule("power", coeff=coeff, exponent=exponent)
        if kind == "perturbed":
            return SequenceRule("perturbed", coeff=coeff, exponent=exponent, eps=float(d["eps"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelParseError(f"{role}: {exc}") from exc
    raise ModelParseError(f"{role}: unknown kind {kind!r}")


def _rule_to_dict(rule: SequenceRule, role: str) -> dict:
    coeff_key = "kstar" if role == "kappa" else "c"
    exp_key = "s" if role == "kappa" else "gamma0"
    if rule.kind == "table":
        return {"kind": "table", "values": list(rule.table)}
    if rule.kind == "constant":
        return {"kind": "constant", coeff_key: rule.coeff}
    if rule.kind == "power":
        kind = "polylog" if role == "kappa" else "power"
        return {"kind": kind, coeff_key: rule.coeff, exp_key: rule.exponent}
    return {"kind": "perturbed", coeff_key: rule.coeff, exp_key: rule.exponent, "eps": rule.eps}


def model_from_dict(d: dict) -> WeightModel:
    if not isinstance(d, dict):
        raise ModelParseError("model spec must be a JSON object")
    unknown = set(d) - {"theta", "kappa", "rho", "profile"}
    if unknown:
        raise ModelParseError(f"unknown model fields: {sorted(unknown)}")
    if "theta" not in d or "kappa" not in d:
        raise ModelParseError("model spec needs 'theta' and 'kappa'")
    prof = GenFnProfile.from_dict(d["profile"]) if d.get("profile") else None
    try:
        rho = float(d.get("rho", 1.0))
    except (TypeError, ValueError) as exc:
        raise ModelParseError(f"rho: {exc}") from exc
    return WeightModel(
        theta=_rule_from_dict(d["theta"], "theta"),
        kappa=_rule_from_dict(d["kappa"], "kappa"),
        rho=rho,
        profile_override=prof,
    )


def model_to_dict(model: WeightModel) -> dict:
    out = {
        "theta": _rule_to_dict(model.theta, "theta"),
        "kappa": _rule_to_dict(model.kappa, "kappa"),
        "rho": model.rho,
    }
    if model.profile_override is not None:
        out["profile"] = model.profile_override.to_dict()
    return out


def dumps_model(model: WeightModel) -> str:
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True)


def load_model(path: str) -> WeightModel:
    """Read a JSON model spec; parse errors report line and column."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return model_from_dict(data)


# reference models -------------------------------------------------------


def constant_model(theta_star: float = 1.0, kappa_star: float = 1.0, rho: float = 1.0) -> WeightModel:
    """theta_j = theta_star, kappa_j = kappa_star (always subcritical)."""
    return WeightModel(
        SequenceRule("constant", coeff=theta_star), SequenceRule("constant", coeff=kappa_star), rho
    )


def polylog_model(s: float, kappa_star: float, theta: float = 1.0, rho: float = 1.0) -> WeightModel:
    """kappa_j = kappa_star * j**(-s) with constant theta_j = theta."""
    return WeightModel(
        SequenceRule("constant", coeff=theta), SequenceRule("power", coeff=kappa_star, exponent=s), rho
    )


def giant_cycle_model(
    s: float = 1.5, gamma0: float = 0.5, kappa_star: Optional[float] = None
) -> WeightModel:
    """kappa_j = kappa_star / j**(s + gamma0), theta_j = j**(-gamma0).

    The default kappa_star = 0.5 / zeta(s + gamma0) puts the model in the
    supercritical regime with half of the points in long cycles.
    """
    if kappa_star is None:
        kappa_star = 0.5 / zeta_real(s + gamma0)
    return WeightModel(
        SequenceRule("power", coeff=1.0, exponent=gamma0),
        SequenceRule("power", coeff=kappa_star, exponent=s + gamma0),
    )
