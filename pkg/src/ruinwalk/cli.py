"""Command-line front end.

Tables go to stdout (or ``--out``), logs and errors to stderr. Errors are
reported as one JSON object on stderr with a stable ``error`` code and a
matching non-zero exit status.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import _backend
from .asymptotics import asymptotic_pmf, tail_slope
from .core import HopProbabilities, RuinError, check_start, check_time
from .crosscheck import crosscheck, random_params
from .exact import PmfQuery, pmf, pmf_via_2f1
from .montecarlo import empirical_pmf
from .moments import (
    mean,
    mgf,
    moment_poly,
    second_moment,
    third_moment,
    total_ruin_probability,
    variance,
)
from .oracles import dp_grid, pmf_integral

log = logging.getLogger("ruinwalk")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CODES = {
    "parameter_error": 3,
    "negative_probability": 3,
    "simplex_violation": 3,
    "domain_error": 4,
    "divergent_moment": 5,
    "capacity_error": 6,
    "non_terminating_series": 7,
    "validation_failed": 8,
}

METHODS = ("exact", "hyp", "dp", "integral", "mc", "asymptotic")

FIG2_DELTAS = {"a": 0.2, "b": 0.1, "c": 0.0}
FIG2_PR = (0.1, 0.3)


class UsageError(RuinError):
    code = "usage_error"


def fmt(v: float) -> str:
    return format(v, ".17g")


def write_table(rows, header, fmt_name, meta, out):
    """Write rows as CSV (``header`` line, 17 significant digits, LF) or JSON."""
    if fmt_name == "json":
        payload = dict(meta)
        payload["rows"] = [dict(zip(header, r)) for r in rows]
        text = json.dumps(payload, indent=None, sort_keys=False, allow_nan=True) + "\n"
    else:
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for r in rows:
            buf.write(",".join(str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in r) + "\n")
        text = buf.getvalue()
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def params_from(args) -> HopProbabilities:
    if args.pr is None or args.pl is None:
        raise UsageError("--pr and --pl are required")
    return HopProbabilities.from_pair(args.pr, args.pl, args.pp)


def t_values(args) -> list[int]:
    if args.t is not None:
        if args.t_min is not None or args.t_max is not None:
            raise UsageError("use either --t or --t-min/--t-max")
        return [check_time(args.t)]
    if args.t_max is None:
        raise UsageError("give --t or --t-max")
    lo = check_time(args.t_min if args.t_min is not None else 0)
    hi = check_time(args.t_max)
    if args.t_step < 1 or hi < lo:
        raise UsageError("need t-min <= t-max and t-step >= 1")
    return list(range(lo, hi + 1, args.t_step))


def _map(fn, items, workers):
    # results keep input order whatever the worker count
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _boundary_value(x, t):
    if x == 0:
        return 1.0 if t == 0 else 0.0
    return 0.0


def pmf_rows(x: int, ts: list[int], params: HopProbabilities, method: str, args) -> list[tuple]:
    if method == "exact":
        vals = _map(lambda t: pmf(PmfQuery(x, t, params)).value, ts, args.workers)
    elif method == "hyp":
        vals = _map(
            lambda t: _boundary_value(x, t) if x == 0 or t < x else pmf_via_2f1(PmfQuery(x, t, params)).value,
            ts,
            args.workers,
        )
    elif method == "integral":
        vals = _map(
            lambda t: _boundary_value(x, t) if x == 0 or t == 0 else pmf_integral(PmfQuery(x, t, params)).value,
            ts,
            args.workers,
        )
    elif method == "asymptotic":
        vals = [_boundary_value(x, t) if x == 0 or t == 0 else asymptotic_pmf(x, t, params).value for t in ts]
    elif method == "dp":
        grid = dp_grid(max(x, 1), max(ts), params).values
        vals = [float(grid[x, t]) for t in ts]
    elif method == "mc":
        emp = empirical_pmf(x, params, args.samples, args.t_cap, args.seed, workers=args.workers)
        vals = [emp.frequency(t) for t in ts]
    else:  # argparse restricts choices
        raise UsageError(f"unknown method {method}")
    return list(zip(ts, vals))


def cmd_pmf(args) -> int:
    params = params_from(args)
    x = check_start(args.x)
    ts = sorted(t_values(args))
    rows = pmf_rows(x, ts, params, args.method, args)
    meta = {"params": params.as_dict(), "method": args.method, "x": x}
    if args.method == "mc":
        meta.update(seed=args.seed, samples=args.samples, t_cap=args.t_cap)
    write_table(rows, ("t", "p"), args.format, meta, args.out)
    return EXIT_OK


def figure2_grid(t_min: int, t_max: int, step: int | None, dense_until: int = 2000, ratio: float = 1.01):
    """Every t up to ``dense_until``, then geometrically spaced; uniform when ``step`` is set."""
    if step:
        return list(range(t_min, t_max + 1, step))
    ts = set(range(t_min, min(dense_until, t_max) + 1))
    v = float(dense_until)
    while v < t_max:
        v *= ratio
        ts.add(min(int(round(v)), t_max))
    ts.add(t_max)
    return sorted(t for t in ts if t >= t_min)


def is_unimodal(values) -> bool:
    """True if the sequence rises (weakly) then falls (weakly), at most one turn."""
    d = np.diff(np.asarray(values, dtype=float))
    d = d[d != 0]
    if d.size == 0:
        return True
    turns = np.count_nonzero(np.diff(np.sign(d)) != 0)
    return turns == 0 or (turns == 1 and d[0] > 0)


def figure2_curves(x: int, ts: list[int], workers: int = 1) -> list[dict]:
    """P(x, t) on ``ts`` for every (panel, pr) curve; values include the log."""
    curves = []
    for panel, delta in FIG2_DELTAS.items():
        for pr in FIG2_PR:
            params = HopProbabilities.from_pair(pr, round(pr + delta, 12))
            vals = _map(lambda t: pmf(PmfQuery(x, t, params)), ts, workers)
            curves.append(
                {
                    "panel": panel,
                    "delta_p": delta,
                    "params": params,
                    "t": np.array(ts),
                    "p": np.array([v.value for v in vals]),
                    "log_p": np.array([v.log_value for v in vals]),
                }
            )
    return curves


def figure2_summary(curves, *, loglog_window=(1e4, 1e5), linear_window=(5e4, 1e5)) -> list[dict]:
    out = []
    for c in curves:
        t, lp, params = c["t"], c["log_p"], c["params"]
        entry = {
            "panel": c["panel"],
            "pr": params.pr,
            "pl": params.pl,
            "pp": params.pp,
            "unimodal": bool(is_unimodal(lp)),
            "mode_t": int(t[int(np.argmax(lp))]),
        }
        if c["delta_p"] == 0:
            sel = (t >= loglog_window[0]) & (t <= loglog_window[1])
            entry["loglog_slope"] = tail_slope(t[sel], lp[sel], loglog=True) if sel.sum() > 1 else None
        else:
            sel = (t >= linear_window[0]) & (t <= linear_window[1])
            entry["tail_slope"] = tail_slope(t[sel], lp[sel]) if sel.sum() > 1 else None
            entry["log_decay_rate"] = math.log(params.decay_rate)
        out.append(entry)
    return out


def cmd_figure2(args) -> int:
    ts = figure2_grid(args.t_min, args.t_max, args.t_step)
    curves = figure2_curves(args.x, ts, args.workers)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for c in curves:
        pr = c["params"].pr
        rows = list(zip(ts, c["p"].tolist(), c["log_p"].tolist()))
        meta = {"params": c["params"].as_dict(), "method": "exact", "x": args.x, "panel": c["panel"]}
        suffix = "json" if args.format == "json" else "csv"
        write_table(rows, ("t", "p", "log_p"), args.format, meta, out_dir / f"fig2_{c['panel']}_pr{pr}.{suffix}")
        if c["delta_p"] == 0:
            rows = list(zip(np.log(c["t"]).tolist(), c["log_p"].tolist()))
            meta = dict(meta, panel="d")
            write_table(rows, ("ln_t", "ln_p"), args.format, meta, out_dir / f"fig2_d_pr{pr}.{suffix}")
    summary = figure2_summary(curves)
    sys.stdout.write(json.dumps({"x": args.x, "curves": summary}, indent=2) + "\n")
    return EXIT_OK


def cmd_moments(args) -> int:
    params = params_from(args)
    x = check_start(args.x)
    report = {
        "params": params.as_dict(),
        "x": x,
        "closed_form": {
            "mean": mean(x, params),
            "second_moment": second_moment(x, params),
            "third_moment": third_moment(x, params),
            "variance": variance(x, params),
        },
        "moment_poly": {},
    }
    for k in range(1, args.k + 1):
        poly = moment_poly(k, params)
        report["moment_poly"][str(k)] = {"value": poly(x), "coefficients": list(poly.coefficients)}
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def cmd_mgf(args) -> int:
    params = params_from(args)
    res = mgf(args.x, args.s, params)
    out = {"params": params.as_dict(), "x": args.x, "s": res.s, "value": res.value, "s_max": res.s_max}
    if args.s == 0:
        out["total_ruin_probability"] = total_ruin_probability(args.x, params)
    sys.stdout.write(json.dumps(out) + "\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.quick:
        x_max, t_max, count = 10, 100, 5
    else:
        x_max, t_max, count = args.x_max, args.t_max, args.count
    params_list = random_params(args.seed, count)
    stats = crosscheck(x_max, t_max, params_list)
    ok = True
    for s in stats.values():
        line = {"pair": s.name, "max_discrepancy": s.worst, "tolerance": s.tol, "ok": s.ok}
        if not s.ok:
            ok = False
            line["offending"] = [
                {"x": w[0], "t": w[1], "params": list(w[2]), "gap": g} for w, g in s.failures[:20]
            ]
        sys.stdout.write(json.dumps(line) + "\n")
    if not ok:
        sys.stderr.write(json.dumps({"error": "validation_failed", "message": "cross-method check failed"}) + "\n")
        return EXIT_CODES["validation_failed"]
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = params_from(args)
    x = check_start(args.x)
    emp = empirical_pmf(x, params, args.samples, args.t_cap, args.seed, workers=args.workers)
    ts = np.nonzero(emp.counts)[0].tolist()
    rows = [(t, int(emp.counts[t]), emp.counts[t] / emp.n_samples) for t in ts]
    meta = {
        "params": params.as_dict(),
        "method": "monte_carlo",
        "x": x,
        "seed": emp.seed,
        "samples": emp.n_samples,
        "t_cap": emp.t_cap,
        "censored": emp.censored,
        "rng_algorithm": emp.rng_algorithm,
    }
    write_table(rows, ("t", "count", "p"), args.format, meta, args.out)
    log.info("censored walks: %d of %d", emp.censored, emp.n_samples)
    return EXIT_OK


def _param_flags(p):
    p.add_argument("--pr", type=float, help="probability of a right hop")
    p.add_argument("--pl", type=float, help="probability of a left hop")
    p.add_argument("--pp", type=float, default=None, help="halting probability (default 1 - pr - pl)")


def _output_flags(p, default_out=None):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=default_out, help="output path ('-' or omitted: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ruinwalk", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pmf", help="first-hitting probabilities P(x, t)")
    _param_flags(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--t-min", type=int)
    p.add_argument("--t-max", type=int)
    p.add_argument("--t-step", type=int, default=1)
    p.add_argument("--method", choices=METHODS, default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--t-cap", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)
    _output_flags(p)
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("figure2", help="P(x, t) curves for three drifts and two right-hop rates")
    p.add_argument("--x", type=int, default=50)
    p.add_argument("--t-min", type=int, default=50)
    p.add_argument("--t-max", type=int, default=100_000)
    p.add_argument("--t-step", type=int, default=None, help="uniform grid (default: dense then geometric)")
    p.add_argument("--workers", type=int, default=1)
    _output_flags(p, default_out="figure2")
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("moments", help="closed-form and recursive moments")
    _param_flags(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--k", type=int, default=3)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("mgf", help="moment generating function")
    _param_flags(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--s", type=float, default=0.0)
    p.set_defaults(func=cmd_mgf)

    p = sub.add_parser("validate", help="cross-method agreement report")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--x-max", type=int, default=30)
    p.add_argument("--t-max", type=int, default=200)
    p.add_argument("--count", type=int, default=25)
    p.add_argument("--seed", type=int, default=20240501)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="Monte Carlo histogram of hitting times")
    _param_flags(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--t-cap", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _output_flags(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    log.debug("kernel backend: %s", _backend.name())
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return EXIT_USAGE
    except RuinError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return EXIT_CODES.get(exc.code, 1)


if __name__ == "__main__":
    sys.exit(main())
