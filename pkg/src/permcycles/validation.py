"""Brute-force oracle and cross-checks between the exact, Monte Carlo and asymptotic layers."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .asymptotics import asymptotic_log_HN, classify, limiting_cycle_fraction, nu_tilde_K
from .errors import DomainError
from .exact_stats import expected_cycle_counts, expected_long_fraction, joint_l_pmf, l1_pmf
from .series import build_table, log_partition, tn_pmf
from .specialfn import zeta_real
from .weights import WeightModel, constant_model, giant_cycle_model, polylog_model, weights_array

__all__ = [
    "ORACLE_MAX_N",
    "OracleResult",
    "BruteForceLaw",
    "integer_partitions",
    "brute_force_oracle",
    "compare",
    "reference_models",
    "oracle_checks",
    "convergence_study",
    "density_flip_grid",
    "run_suite",
]

ORACLE_MAX_N = 9


@dataclass(frozen=True)
class OracleResult:
    """Comparison of a computed quantity against an independent oracle value."""

    name: str
    value: float
    oracle: float
    rel_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.rel_error <= self.tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def compare(name: str, value: float, oracle: float, tol: float) -> OracleResult:
    """Relative error, falling back to absolute error when the oracle is zero."""
    scale = abs(oracle)
    err = abs(value - oracle) / scale if scale > 0 else abs(value - oracle)
    return OracleResult(name, float(value), float(oracle), float(err), tol)


def integer_partitions(n: int, max_part: Optional[int] = None):
    """Partitions of n as nonincreasing tuples."""
    max_part = n if max_part is None else max_part
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


@dataclass(frozen=True)
class BruteForceLaw:
    """Exact law of cycle types by enumeration.

    ``types`` maps a partition (descending parts) to its probability and
    ``H`` is the partition function sum over types of
    prod_j w_j**c_j / (j**c_j c_j!).
    """

    n_points: int
    H: float
    types: Dict[tuple, float]

    def expected_counts(self) -> np.ndarray:
        e = np.zeros(self.n_points)
        for parts, p in self.types.items():
            for l in parts:
                e[l - 1] += p
        return e

    def l1_pmf(self) -> np.ndarray:
        # the cycle through point 1 has length l with probability l * C_l / N
        out = np.zeros(self.n_points)
        for parts, p in self.types.items():
            for l in set(parts):
                out[l - 1] += p * l * parts.count(l) / self.n_points
        return out

    def joint_l12(self) -> Dict[tuple, float]:
        """P(L_1 = a, L_2 = b); b = 0 when the first cycle covers everything."""
        n = self.n_points
        out: Dict[tuple, float] = defaultdict(float)
        for parts, p in self.types.items():
            counts: Dict[int, int] = defaultdict(int)
            for l in parts:
                counts[l] += 1
            for a in counts:
                pa = p * a * counts[a] / n
                rest = n - a
                if rest == 0:
                    out[(a, 0)] += pa
                    continue
                counts[a] -= 1
                for b, cb in counts.items():
                    if cb:
                        out[(a, b)] += pa * b * cb / rest
                counts[a] += 1
        return dict(out)

    def tn_pmf(self) -> np.ndarray:
        out = np.zeros(self.n_points)
        for parts, p in self.types.items():
            out[len(parts) - 1] += p
        return out


def brute_force_oracle(model: WeightModel, n_points: int) -> BruteForceLaw:
    """Enumerate cycle types of S_N weighted by Cauchy's class sizes."""
    if not 1 <= n_points <= ORACLE_MAX_N:
        raise DomainError(f"brute-force oracle needs 1 <= N <= {ORACLE_MAX_N}")
    w = weights_array(model, n_points, n_points)
    raw: Dict[tuple, float] = {}
    for parts in integer_partitions(n_points):
        val = 1.0
        for l in set(parts):
            c = parts.count(l)
            val *= w[l - 1] ** c / (l**c * math.factorial(c))
        raw[parts] = val
    H = math.fsum(raw.values())
    if H <= 0:
        raise DomainError("all cycle types have zero weight")
    return BruteForceLaw(n_points, H, {k: v / H for k, v in raw.items()})


def reference_models() -> Dict[str, WeightModel]:
    """Constant (subcritical), supercritical polylog and giant-cycle reference models."""
    return {
        "constant": constant_model(1.0, 1.0),
        "supercritical_polylog": polylog_model(2.0, 0.5 / zeta_real(2.0), theta=1.0),
        "giant_cycle": giant_cycle_model(),
    }


def oracle_checks(model: WeightModel, n_points: int, tol: float = 1e-10, label: str = "") -> List[OracleResult]:
    """Every exact-layer output against the enumeration oracle at one N."""
    law = brute_force_oracle(model, n_points)
    tab = build_table(model, n_points)
    pre = f"{label}N={n_points}:"
    out = [compare(pre + "H_N", math.exp(tab.log_H), law.H, tol)]
    for j, (a, b) in enumerate(zip(expected_cycle_counts(model, n_points, table=tab), law.expected_counts()), 1):
        out.append(compare(f"{pre}E[C_{j}]", a, b, tol))
    for l, (a, b) in enumerate(zip(l1_pmf(model, n_points, table=tab), law.l1_pmf()), 1):
        out.append(compare(f"{pre}P(L1={l})", a, b, tol))
    for (a, b), p in sorted(law.joint_l12().items()):
        lengths = (a,) if b == 0 else (a, b)
        out.append(compare(f"{pre}P(L1={a},L2={b})", joint_l_pmf(model, n_points, lengths, table=tab).value, p, tol))
    for k, (a, b) in enumerate(zip(tn_pmf(model, n_points).pmf, law.tn_pmf()), 1):
        out.append(compare(f"{pre}P(T={k})", a, b, tol))
    return out


@dataclass(frozen=True)
class ConvergenceRow:
    n_points: int
    exact: float
    asymptotic: float
    ratio: float


def _monotone_tail(rows: Sequence[ConvergenceRow], slack: float = 1e-12) -> bool:
    logs = [abs(math.log(r.ratio)) for r in rows[-3:]]
    violations = sum(1 for a, b in zip(logs, logs[1:]) if b > a + slack)
    return violations <= 1


def convergence_study(model: WeightModel, quantity: str, n_grid: Iterable[int], k: int = 1) -> List[ConvergenceRow]:
    """Exact versus limiting values along n_grid.

    quantity: "H_N" (ratio of linear values), "C1" (E[C_1]/N against
    kappa_1 r_*), or "nu_K" (expected long fraction against nu_tilde_K; the
    ratio column holds 1 + difference).
    """
    rep = classify(model)
    rows = []
    for n in n_grid:
        n = int(n)
        if quantity == "H_N":
            exact = log_partition(model, n)
            asym = asymptotic_log_HN(model, n, rep).log_value
            ratio = math.exp(asym - exact)
        elif quantity == "C1":
            exact = float(expected_cycle_counts(model, n, 1)[0]) / n
            asym = limiting_cycle_fraction(model, 1, rep).value
            ratio = exact / asym
        elif quantity == "nu_K":
            exact = expected_long_fraction(model, n, k)
            asym = nu_tilde_K(model, k, rep)
            ratio = 1.0 + (exact - asym)
        else:
            raise DomainError(f"unknown quantity {quantity!r}")
        rows.append(ConvergenceRow(n, exact, asym, ratio))
    return rows


def density_flip_grid(base: WeightModel, rho_grid: Iterable[float]) -> List[tuple]:
    """(rho, regime, rho_crit) across a density grid for a fixed base model."""
    out = []
    for rho in rho_grid:
        rep = classify(base.with_density(rho))
        out.append((float(rho), rep.regime, rep.rho_crit))
    return out


def _check(name: str, ok: bool, detail: str = "") -> dict:
    return {"name": name, "passed": bool(ok), "detail": detail}


def run_suite(suite: str = "quick") -> dict:
    """Run the cross-check suite; ``full`` adds larger grids. Returns a JSON-ready report."""
    if suite not in ("quick", "full"):
        raise DomainError("suite must be 'quick' or 'full'")
    full = suite == "full"
    checks: List[dict] = []
    models = reference_models()

    n_max = ORACLE_MAX_N if full else 6
    for name, model in models.items():
        results = []
        for n in range(1, n_max + 1):
            results += oracle_checks(model, n, label=f"{name}:")
        worst = max(results, key=lambda r: r.rel_error)
        checks.append(_check(f"oracle:{name}", all(r.passed for r in results), f"max rel err {worst.rel_error:.3g}"))

    const = models["constant"]
    grid = [2**k for k in range(5, 13 if full else 11)]
    rows = convergence_study(const, "H_N", grid)
    tol = 0.01 if full else 0.02
    checks.append(_check(
        "convergence:constant:H_N",
        abs(rows[-1].ratio - 1) < tol and _monotone_tail(rows),
        f"final ratio {rows[-1].ratio:.8g}",
    ))
    rows = convergence_study(const, "C1", grid)
    checks.append(_check("convergence:constant:C1", abs(rows[-1].ratio - 1) < tol and _monotone_tail(rows),
                         f"final ratio {rows[-1].ratio:.8g}"))
    sup = models["supercritical_polylog"]
    for k in (1, 2, 4):
        rows = convergence_study(sup, "nu_K", [256, 1024, 4096] if full else [128, 512, 2048], k=k)
        diffs = [abs(r.exact - r.asymptotic) for r in rows]
        checks.append(_check(f"convergence:supercritical:nu_K={k}", diffs[-1] < diffs[0],
                             f"differences {', '.join(f'{d:.3g}' for d in diffs)}"))

    rep = classify(sup)
    checks.append(_check("nu_tilde:supercritical", abs(rep.nu_tilde - 0.5) < 1e-12, f"{rep.nu_tilde!r}"))
    base = polylog_model(2.0, 1.0)
    rc = classify(base).rho_crit
    flips = density_flip_grid(base, [rc * f for f in (0.5, 0.9, 0.999, 1.001, 1.1, 2.0)])
    expect = ["Subcritical"] * 3 + ["Supercritical"] * 3
    checks.append(_check("density:flip", [f[1] for f in flips] == expect and abs(rc - zeta_real(2.0)) < 1e-10,
                         f"rho_c {rc!r}"))
    return {"suite": suite, "passed": all(c["passed"] for c in checks), "checks": checks}
