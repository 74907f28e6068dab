"""Command-line front end.

Every command writes a table (CSV or JSON) and exits 0 only when the
properties it checks hold, so the commands double as CI checks::

    nmwitness fig1 --tstar 1 --out fig1.csv
    nmwitness divisibility --s 0 1 2 --t 1 2 2
    nmwitness scan --kind trace_distance --trials 200 --seed 7
    nmwitness profile-match --kind trace_distance --targets targets.csv
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import divisibility as dv
from . import profiles as pf
from . import witness as wt
from .dynamics import ENMParams, RateFunctions
from .states import CONTRACTIVE_KINDS, contractive_function, from_bloch, random_state

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_USAGE = 2


@dataclass
class Report:
    meta: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    ok: bool = True


def _fmt(x: Any) -> Any:
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x) or math.isnan(x):
            return str(x)
        return float(f"{x:.12g}")
    return x


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        payload = {
            "meta": {k: _fmt(v) for k, v in report.meta.items()},
            "rows": [{c: _fmt(v) for c, v in zip(report.columns, row)} for row in report.rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    for k, v in report.meta.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.columns)
    for row in report.rows:
        w.writerow([f"{v:.12g}" if isinstance(v, (float, np.floating)) else _fmt(v) for v in row])
    return buf.getvalue()


def uniform_grid(t_max: float, steps: int, extra: Sequence[float] = ()) -> np.ndarray:
    g = np.linspace(0.0, t_max, steps)
    return np.unique(np.concatenate([g, [x for x in extra if 0.0 <= x <= t_max]]))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_fig1(args) -> Report:
    params = ENMParams(args.alpha, args.c)
    sc = wt.build_scenario(params, args.tstar)
    t_rev = wt.t_up(sc)
    extra = [args.tstar]
    if args.refine:
        extra += list(np.linspace(0.0, min(args.tmax, 3 * args.tstar), args.refine))
    grid = uniform_grid(args.tmax, args.steps, extra)
    rep = Report(
        meta={
            "command": "fig1",
            "alpha": params.alpha,
            "c": params.c,
            "t_star": sc.t_star,
            "lambda_star": sc.lambda_star,
            "t_up": "none" if t_rev is None else t_rev,
            "right_derivative_half_trace_distance": wt.right_derivative(sc),
            "right_derivative_negativity": 0.5 * wt.right_derivative(sc),
        },
        columns=["t", "negativity_full", "negativity_shortcut", "analytic_half_trace_distance"],
    )
    worst_methods = worst_analytic = 0.0
    for t in grid:
        full = wt.witness_negativity(sc, t, "full")
        short = wt.witness_negativity(sc, t, "shortcut")
        half = 0.5 * wt.analytic_trace_distance(sc, t, t_rev)
        worst_methods = max(worst_methods, abs(full - short))
        worst_analytic = max(worst_analytic, abs(half - 2 * short))
        rep.rows.append([t, full, short, half])
    neg = np.array([r[1] for r in rep.rows])
    before = grid <= sc.t_star
    after = (grid > sc.t_star) & (grid <= (t_rev if t_rev is not None else math.inf))
    first_after = np.nonzero(after)[0][:1]
    rises = bool(first_after.size and neg[first_after[0]] > neg[first_after[0] - 1])
    monotone_before = bool(np.all(np.diff(neg[before]) <= 1e-10))
    rep.meta.update(
        max_method_gap=worst_methods,
        max_analytic_gap=worst_analytic,
        monotone_before_t_star=monotone_before,
        rises_after_t_star=rises,
    )
    rep.ok = worst_methods <= 1e-9 and worst_analytic <= 1e-9 and monotone_before and rises
    return rep


def cmd_divisibility(args) -> Report:
    params = ENMParams(args.alpha, args.c)
    if len(args.s) != len(args.t):
        raise UsageError("--s and --t must list the same number of times (they are paired)")
    for s, t in zip(args.s, args.t):
        if not 0.0 <= s <= t:
            raise UsageError(f"invalid pair s={s}, t={t}: need 0 <= s <= t")
    rep = Report(
        meta={"command": "divisibility", "alpha": params.alpha, "c": params.c},
        columns=["s", "t", "min_eigenvalue", "cp", "p1", "p2", "p3", "residual"],
    )
    for s, t in zip(args.s, args.t):
        closed = dv.enm_intermediate_choi(params, s, t)
        numeric = dv.choi_of(dv.enm_intermediate(params, s, t), 2)
        verdict = dv.is_cp(closed)
        dec = dv.enm_decomposition(params, s, t)
        rep.rows.append([s, t, verdict.min_eigenvalue, verdict.cp, dec.p1, dec.p2, dec.p3, dec.residual])
        valid = min(dec.p1, dec.p2, dec.p3) >= -1e-12 and dec.residual <= 1e-10
        agrees = float(np.max(np.abs(closed.matrix - numeric.matrix))) <= 1e-10
        # only the endpoints are guaranteed CP; long intervals from early s can be CP too
        endpoint_ok = verdict.cp if (s == 0.0 or s == t) else True
        rep.ok &= valid and agrees and endpoint_ok
    return rep


def _scan_dynamics(args) -> ENMParams | RateFunctions:
    if args.rates:
        return RateFunctions.constant(*args.rates)
    return ENMParams(args.alpha, args.c)


def cmd_scan(args) -> Report:
    grid = uniform_grid(args.tmax, args.steps)
    meta = {"command": "scan", "kind": args.kind, "trials": args.trials, "seed": args.seed,
            "t_max": args.tmax, "steps": len(grid)}
    if args.kind == "positive_map":
        res = {args.kind: pf.positive_map_monotonicity_trial(args.trials, args.seed)}
    elif args.kind == "enm_bipartite":
        res = {args.kind: pf.enm_bipartite_trial(args.trials, args.seed, grid)}
    else:
        kinds = list(CONTRACTIVE_KINDS) if args.kind == "all" else [args.kind]
        dyn = _scan_dynamics(args)
        meta["dynamics"] = f"rates{tuple(args.rates)}" if args.rates else f"enm(alpha={args.alpha}, c={args.c})"
        res = pf.contractivity_trial(kinds, args.trials, args.seed, grid, dyn, args.renyi_alpha)
    rep = Report(meta=meta, columns=["function", "trials", "max_increase", "passed"])
    for k, r in res.items():
        rep.rows.append([k, r.trials, r.max_violation, r.passed()])
        rep.ok &= r.passed()
    return rep


def read_targets(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``t,target`` pairs from CSV (header row, '#' comments) or JSON rows."""
    text = path.read_text()
    if path.suffix.lower() == ".json":
        rows = json.loads(text)["rows"]
        return np.array([r["t"] for r in rows], float), np.array([r["target"] for r in rows], float)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    rows = list(reader)
    return np.array([r["t"] for r in rows], float), np.array([r["target"] for r in rows], float)


def cmd_profile_match(args) -> Report:
    params = ENMParams(args.alpha, args.c)
    meta: dict[str, Any] = {"command": "profile-match", "kind": args.kind}
    if args.kind == "negativity":
        sc = wt.build_scenario(params, args.tstar)
        start = wt.tripartite_initial(sc)
        value_at = lambda t: wt.witness_negativity(sc, t, "shortcut")  # noqa: E731
        default_end = args.tstar
    else:
        rho, sigma = from_bloch(args.rho), from_bloch(args.sigma)
        if args.seed is not None:
            rng = np.random.default_rng(args.seed)
            rho, sigma = random_state(2, rng), random_state(2, rng)
            meta["seed"] = args.seed
        fn = contractive_function(args.kind, args.renyi_alpha)
        value_at = lambda t: pf.contractive_scan(fn, params, rho, sigma, [t]).values[0]  # noqa: E731
        default_end = args.tmax
    if args.targets:
        times, targets = read_targets(Path(args.targets))
        meta["targets"] = str(args.targets)
    else:
        times = np.linspace(0.0, default_end, args.steps)
        targets = np.array([value_at(t) for t in times])
        meta["targets"] = f"enm(alpha={params.alpha}, c={params.c})"
    if args.kind == "negativity":
        match = pf.match_entanglement_profile(targets, times, start)
    else:
        match = pf.match_profile(targets, times, fn, rho, sigma)
    rep = Report(meta=meta, columns=["t", "target", "a", "achieved", "error", "feasible"])
    a = np.concatenate([[1.0], match.a])
    for i in range(len(times)):
        rep.rows.append([match.times[i], match.targets[i], a[i], match.achieved[i], match.errors[i], match.feasible[i]])
    rep.meta["max_error"] = match.max_error
    rep.ok = match.ok
    return rep


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class UsageError(ValueError):
    pass


def _positive(x: str) -> float:
    v = float(x)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {x}")
    return v


def _alpha(x: str) -> float:
    v = float(x)
    if not v >= 1:
        raise argparse.ArgumentTypeError(f"alpha must be >= 1, got {x}")
    return v


def _steps(x: str) -> int:
    v = int(x)
    if v < 2:
        raise argparse.ArgumentTypeError(f"steps must be >= 2, got {x}")
    return v


def _vec3(x: str) -> list[float]:
    parts = [float(v) for v in x.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers")
    return parts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=_alpha, default=2.0, help="ENM alpha (>= 1)")
    common.add_argument("--c", type=_positive, default=0.5, help="ENM rate scale c (> 0)")
    common.add_argument("--tstar", type=_positive, default=1.0, help="witness time t*")
    common.add_argument("--tmax", type=_positive, default=6.0, help="end of the time grid")
    common.add_argument("--steps", type=_steps, default=600, help="grid points")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="nmwitness", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig1", parents=[common], help="tripartite negativity curve")
    p.add_argument("--refine", type=int, default=0, help="extra grid points on [0, 3 t*]")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("divisibility", parents=[common], help="Choi spectrum and decomposition of V_{t,s}")
    p.add_argument("--s", type=float, nargs="+", default=[0.0, 0.5, 1.0, 1.0, 2.0])
    p.add_argument("--t", type=float, nargs="+", default=[1.0, 1.0, 2.0, 1.0, 4.0])
    p.set_defaults(func=cmd_divisibility)

    p = sub.add_parser("scan", parents=[common], help="monotonicity property trials")
    p.add_argument("--kind", default="trace_distance",
                   choices=[*CONTRACTIVE_KINDS, "all", "positive_map", "enm_bipartite"])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--renyi-alpha", type=float, default=2.0)
    p.add_argument("--rates", type=float, nargs=3, metavar=("G1", "G2", "G3"),
                   help="constant decay rates replacing the ENM model")
    p.set_defaults(func=cmd_scan, steps=61)

    p = sub.add_parser("profile-match", parents=[common], help="reproduce a monotone profile with depolarizing steps")
    p.add_argument("--kind", default="trace_distance", choices=[*CONTRACTIVE_KINDS, "negativity"])
    p.add_argument("--targets", type=Path, default=None, help="CSV or JSON with t,target columns")
    p.add_argument("--rho", type=_vec3, default=[0.0, 0.0, 1.0], help="Bloch vector of rho")
    p.add_argument("--sigma", type=_vec3, default=[0.0, 0.0, -1.0], help="Bloch vector of sigma")
    p.add_argument("--seed", type=int, default=None, help="draw random rho, sigma instead")
    p.add_argument("--renyi-alpha", type=float, default=2.0)
    p.set_defaults(func=cmd_profile_match, steps=61)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except pf.NonMonotoneProfile as exc:
        print(f"error: {exc} (first offending index {exc.index})", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(report, args.format)
    if args.out is None:
        sys.stdout.write(text)
    else:
        try:
            args.out.write_text(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    return EXIT_OK if report.ok else EXIT_PROPERTY
