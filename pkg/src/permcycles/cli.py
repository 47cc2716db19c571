"""Command-line interface: ``permcycles <command> [options]``.

Commands: exact, sample, asymp, limitlaws, spatial, validate.

Exit codes: 0 success, 2 parse error, 3 domain error, 4 unsupported regime,
5 validation failure.

Numbers are printed with 17 significant digits so doubles round-trip. CSV
output always has a header row and LF line endings. JSON never contains NaN
or Infinity: such values become null and their keys are listed under
``nonfinite``.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import Any, Iterable, List, Optional, Sequence

import numpy as np

from . import __version__
from .asymptotics import asymptotic_log_HN, classify, sample_tn_limit, tn_limit_params
from .errors import DomainError, ModelParseError, PermCyclesError, ValidationFailure
from .exact_stats import expected_cycle_counts, expected_long_fraction, l1_pmf
from .limitlaws import (
    DEFAULT_TERMS,
    sample_gem,
    sample_pd,
    sample_stick,
    sample_stick_degenerate,
    stick_moments,
)
from .sampler import ordered_lengths, run_monte_carlo, sample_lengths
from .series import build_table, log_partition, tn_pmf
from .spatial_bridge import GRID_COLUMNS, SpatialConfig, heuristic_Theta, heuristic_theta, order_parameter, spatial_grid
from .validation import convergence_study, run_suite
from .weights import dumps_model, load_model

__all__ = ["main", "build_parser", "fmt", "parse_grid"]

EXACT_WHAT = ("partition", "cycle-counts", "l1", "tn-dist", "long-fraction")


# formatting -------------------------------------------------------------


def fmt(x: Any) -> str:
    """17 significant digits for floats (integral floats keep a trailing .0)."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        s = format(float(x), ".17g")
        if s.lstrip("-").isdigit():
            s += ".0"
        return s
    return "" if x is None else str(x)


def _jsonable(obj: Any, path: str, bad: List[str]) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v, f"{path}.{k}" if path else str(k), bad) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v, f"{path}[{i}]", bad) for i, v in enumerate(obj)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            bad.append(f"{path}={'nan' if math.isnan(obj) else ('inf' if obj > 0 else '-inf')}")
            return None
        return float(obj)
    return obj


def to_json(obj: dict) -> str:
    bad: List[str] = []
    clean = _jsonable(obj, "", bad)
    if bad:
        clean["nonfinite"] = bad
    # repr-based float output is already shortest round-trip
    return json.dumps(clean, indent=2, sort_keys=False, allow_nan=False) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_grid(spec: str) -> List[int]:
    """'a:b:step' (inclusive) or a comma list."""
    try:
        if ":" in spec:
            parts = [int(p) for p in spec.split(":")]
            if len(parts) == 2:
                parts.append(1)
            a, b, step = parts
            if step <= 0 or b < a:
                raise ValueError
            return list(range(a, b + 1, step))
        return [int(p) for p in spec.split(",") if p]
    except ValueError as exc:
        raise DomainError(f"invalid grid {spec!r}; expected a:b:step or a comma list") from exc


def _float_list(spec: str) -> List[float]:
    try:
        return [float(p) for p in spec.split(",") if p]
    except ValueError as exc:
        raise DomainError(f"invalid number list {spec!r}") from exc


def _rows_to_output(header, rows, fmt_kind: str) -> str:
    if fmt_kind == "json":
        return to_json({"columns": list(header), "rows": [list(r) for r in rows]})
    return to_csv(header, rows)


def _load(args) -> Any:
    model = load_model(args.model)
    if getattr(args, "dump_model", None):
        with open(args.dump_model, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps_model(model) + "\n")
    return model


def _require_n(args) -> int:
    if args.n is None:
        raise DomainError("--n is required")
    if args.n < 1:
        raise DomainError("--n must be >= 1")
    return args.n


# commands ---------------------------------------------------------------


def cmd_exact(args) -> int:
    model = _load(args)
    what = args.what
    if what == "partition":
        grid = parse_grid(args.n_grid) if args.n_grid else None
        if grid:
            rows = [(n, log_partition(model, n)) for n in grid]
            header = ("N", "log_HN")
        else:
            rows = [("log_HN", log_partition(model, _require_n(args)))]
            header = ("quantity", "value")
    else:
        n = _require_n(args)
        if what == "cycle-counts":
            e = expected_cycle_counts(model, n)
            header, rows = ("j", "expected_count"), [(j, v) for j, v in enumerate(e, 1)]
        elif what == "l1":
            p = l1_pmf(model, n)
            header, rows = ("l", "probability"), [(l, v) for l, v in enumerate(p, 1)]
        elif what == "tn-dist":
            p = tn_pmf(model, n).pmf
            header, rows = ("k", "probability"), [(k, v) for k, v in enumerate(p, 1)]
        else:
            if args.k is None:
                raise DomainError("--what long-fraction needs --k")
            header, rows = ("K", "long_fraction"), [(args.k, expected_long_fraction(model, n, args.k))]
    _emit(_rows_to_output(header, rows, args.format), args.out)
    return 0


def _mc_summary(model, n: int, samples: int, seed: int, threads: Optional[int], top_k: int) -> dict:
    nu = None
    regime = None
    try:
        rep = classify(model)
        regime = rep.regime
        nu = rep.nu_tilde if rep.nu_tilde > 0 else None
    except PermCyclesError:
        pass
    table = build_table(model, n)
    mc = run_monte_carlo(model, n, samples, seed, threads=threads, top_k=top_k, table=table, nu_tilde=nu)
    scale = n * (nu if nu else 1.0)
    scaled = mc.top_lengths / scale
    t = mc.t_values.astype(float)
    j_show = min(n, 16)
    return {
        "n_points": n,
        "n_samples": samples,
        "seed": seed,
        "regime": regime,
        "nu_tilde": nu,
        "sum_lengths_ok": mc.sum_lengths_ok,
        "ordered_length_scale": scale,
        "scaled_ordered_mean": scaled.mean(axis=0).tolist(),
        "scaled_ordered_second_moment": (scaled**2).mean(axis=0).tolist(),
        "mean_total_cycles": float(t.mean()),
        "var_total_cycles": float(t.var(ddof=1)) if samples > 1 else 0.0,
        "mean_counts": mc.mean_counts[:j_show].tolist(),
        "count_standard_errors": mc.count_se()[:j_show].tolist(),
    }


def cmd_sample(args) -> int:
    model = _load(args)
    n = _require_n(args)
    if args.seed is None:
        raise DomainError("sampling needs --seed")
    if args.samples < 1:
        raise DomainError("--samples must be >= 1")
    table = build_table(model, n)
    draws = sample_lengths(model, n, args.samples, args.seed, table=table)
    ok = all(int(d.sum()) == n for d in draws)
    if args.format == "json":
        text = to_json({"lengths": [d.tolist() for d in draws]})
    else:
        text = "lengths\n" + "".join(" ".join(str(int(v)) for v in d) + "\n" for d in draws)
    _emit(text, args.out)
    summary = _mc_summary(model, n, args.samples, args.seed, args.threads, args.top_k)
    summary["sum_lengths_ok"] = bool(ok and summary["sum_lengths_ok"])
    stext = to_json(summary)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(stext)
    else:
        sys.stderr.write(stext)
    return 0


def cmd_asymp(args) -> int:
    model = _load(args)
    if args.n_grid:
        rows = convergence_study(model, "H_N", parse_grid(args.n_grid))
        text = _rows_to_output(
            ("N", "log_HN_exact", "log_HN_asymptotic", "ratio"),
            [(r.n_points, r.exact, r.asymptotic, r.ratio) for r in rows],
            args.format,
        )
        _emit(text, args.out)
        return 0
    rep = classify(model)
    out = rep.to_dict()
    if args.n is not None:
        n = _require_n(args)
        av = asymptotic_log_HN(model, n, rep)
        out["N"] = n
        out["log_HN_asymptotic"] = av.log_value
        if n <= args.exact_cap:
            out["log_HN_exact"] = log_partition(model, n)
    _emit(to_json(out), args.out)
    return 0


def cmd_limitlaws(args) -> int:
    rng = np.random.default_rng(args.seed)
    law = args.law
    if law == "moments":
        val = stick_moments(args.nu, args.theta, args.n1, args.n2)
        text = _rows_to_output(("nu", "theta_star", "n1", "n2", "moment"),
                               [(args.nu, args.theta, args.n1, args.n2, val)], args.format)
        _emit(text, args.out)
        return 0
    if args.seed is None:
        raise DomainError("sampling needs --seed")
    if law == "tn-limit":
        model = _load(args)
        tn = tn_limit_params(model)
        z = sample_tn_limit(tn, args.samples, rng)
        _emit(_rows_to_output(("value",), [(v,) for v in z], args.format), args.out)
        return 0
    rows = []
    for _ in range(args.samples):
        if law == "gem":
            x = sample_gem(args.theta, args.terms, rng)
        elif law == "pd":
            x = sample_pd(args.theta, args.terms, rng)
        elif law == "stick":
            x = sample_stick(args.nu, args.theta, args.terms, rng).X
            if args.ordered:
                x = np.asarray(ordered_lengths(x))
        else:
            x = sample_stick_degenerate(args.nu, args.terms, rng).X
        rows.append(x[: args.show])
    header = tuple(f"x{i}" for i in range(1, min(args.show, args.terms) + 1))
    _emit(_rows_to_output(header, rows, args.format), args.out)
    return 0


def cmd_spatial(args) -> int:
    cfg = SpatialConfig(args.family, args.d, 1.0, args.gamma, args.rho)
    L_grid = _float_list(args.L)
    j_grid = _float_list(args.j)
    if args.what == "grid":
        rows = spatial_grid(cfg, L_grid, j_grid)
        _emit(_rows_to_output(GRID_COLUMNS, rows, args.format), args.out)
        return 0
    rows = []
    for L in L_grid:
        c = cfg.with_L(L)
        for j in j_grid:
            eta = order_parameter(c, j)
            rows.append((c.family, c.d, c.gamma, L, j, eta, heuristic_Theta(eta), heuristic_theta(c, j)))
    header = ("family", "d", "gamma", "L", "j", "eta", "Theta", "theta_shape")
    _emit(_rows_to_output(header, rows, args.format), args.out)
    return 0


def cmd_validate(args) -> int:
    report = run_suite(args.suite)
    _emit(to_json(report), args.out)
    if not report["passed"]:
        raise ValidationFailure("validation suite failed")
    return 0


# parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="permcycles", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, help="worker threads (default PERMCYCLES_THREADS or all cores)")

    with_model = argparse.ArgumentParser(add_help=False)
    with_model.add_argument("--model", required=True, help="JSON model spec")
    with_model.add_argument("--dump-model", metavar="PATH", help="write the parsed model back as canonical JSON")

    e = sub.add_parser("exact", parents=[common, with_model], help="exact finite-N quantities")
    e.add_argument("--n", type=int)
    e.add_argument("--n-grid", help="a:b:step grid (partition only)")
    e.add_argument("--what", choices=EXACT_WHAT, default="partition")
    e.add_argument("--k", type=int, help="cutoff K for long-fraction")
    e.set_defaults(func=cmd_exact)

    s = sub.add_parser("sample", parents=[common, with_model], help="exact samples of cycle lengths")
    s.add_argument("--n", type=int)
    s.add_argument("--samples", type=int, default=1)
    s.add_argument("--seed", type=int)
    s.add_argument("--summary", metavar="PATH", help="summary JSON path (default stderr)")
    s.add_argument("--top-k", type=int, default=4, help="ordered lengths kept in the summary")
    s.set_defaults(func=cmd_sample)

    a = sub.add_parser("asymp", parents=[common, with_model], help="regime report and asymptotics")
    a.add_argument("--n", type=int)
    a.add_argument("--n-grid", help="a:b:step grid for an exact-vs-asymptotic H_N table")
    a.add_argument("--exact-cap", type=int, default=20000, help="largest N for the exact comparison")
    a.set_defaults(func=cmd_asymp)

    l = sub.add_parser("limitlaws", parents=[common], help="GEM, PD and stick-breaking samplers")
    l.add_argument("--law", choices=("gem", "pd", "stick", "stick-degenerate", "moments", "tn-limit"), required=True)
    l.add_argument("--theta", type=float, default=1.0)
    l.add_argument("--nu", type=float, default=1.0)
    l.add_argument("--terms", type=int, default=DEFAULT_TERMS)
    l.add_argument("--show", type=int, default=8, help="leading pieces printed per sample")
    l.add_argument("--samples", type=int, default=1)
    l.add_argument("--seed", type=int)
    l.add_argument("--ordered", action="store_true", help="sort stick pieces in descending order")
    l.add_argument("--n1", type=int, default=1)
    l.add_argument("--n2", type=int, default=0)
    l.add_argument("--model", help="JSON model spec (tn-limit only)")
    l.set_defaults(func=cmd_limitlaws)

    sp = sub.add_parser("spatial", parents=[common], help="lattice sums and heuristic corrections")
    sp.add_argument("--what", choices=("grid", "heuristic"), default="grid")
    sp.add_argument("--family", choices=("gaussian", "stable"), default="gaussian")
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--L", default="10", help="comma list of box sides")
    sp.add_argument("--j", default="1", help="comma list of cycle lengths")
    sp.set_defaults(func=cmd_spatial)

    v = sub.add_parser("validate", parents=[common], help="run the cross-check suite")
    v.add_argument("--suite", choices=("quick", "full"), default="quick")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PermCyclesError as exc:
        sys.stderr.write(f"permcycles: error: {exc}\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"permcycles: error: {exc}\n")
        return ModelParseError.exit_code


if __name__ == "__main__":
    sys.exit(main())
