"""Command-line front end: bounds, solves, extremal profiles, sweeps.

Reports are JSON with a versioned schema and deterministic float
formatting (17 significant digits); function dumps go to CSV next to
the report.  Exit codes: 2 for parse errors, 3 for solver failures.
"""

from __future__ import annotations

import argparse
import itertools
import math
import os
import sys
import time

import numpy as np

from . import __version__, sharpness, spectral, transform
from .weights import TWO_PI, PeriodicWeight, sine_family
from .spectral import SolverError

SCHEMA_VERSION = 1


class WeightParseError(ValueError):
    """A weight spec string could not be parsed."""


def parse_angle(token):
    """Parse an angle literal; a trailing 'pi' multiplies by pi."""
    tok = token.strip()
    try:
        if tok.endswith("pi"):
            head = tok[:-2]
            return (float(head) if head else 1.0) * math.pi
        return float(tok)
    except ValueError:
        raise WeightParseError(f"bad angle literal {token!r}") from None


def parse_weight(spec):
    """Parse the weight mini-language.

    Base forms: ``const:v``, ``sine:M``, ``bar-a:L``, ``bar-gamma:M,p,q``,
    ``pwc:theta1=v1,theta2=v2,...``.  Modifiers ``inv:`` (reciprocal) and
    ``pow:r:`` (pointwise power) may be prefixed.
    """
    if spec.startswith("inv:"):
        return parse_weight(spec[4:]).power(-1.0)
    if spec.startswith("pow:"):
        parts = spec.split(":", 2)
        if len(parts) != 3:
            raise WeightParseError(f"pow modifier needs 'pow:r:spec', got {spec!r}")
        try:
            r = float(parts[1])
        except ValueError:
            raise WeightParseError(f"bad power exponent {parts[1]!r}") from None
        return parse_weight(parts[2]).power(r)

    kind, sep, arg = spec.partition(":")
    if not sep:
        raise WeightParseError(f"weight spec {spec!r} has no ':'")
    try:
        if kind == "const":
            return PeriodicWeight.constant(float(arg))
        if kind == "sine":
            return sine_family(float(arg))
        if kind == "bar-a":
            return sharpness.extremal_weight_ps(float(arg))
        if kind == "bar-gamma":
            m_str, p_str, q_str = arg.split(",")
            return sharpness.extremal_weight_pq(
                float(m_str), float(p_str), float(q_str)).weight
        if kind == "pwc":
            breakpoints, values = [], []
            for pair in arg.split(","):
                theta_str, eq, v_str = pair.partition("=")
                if not eq:
                    raise WeightParseError(f"bad pwc entry {pair!r}")
                breakpoints.append(parse_angle(theta_str))
                values.append(float(v_str))
            return PeriodicWeight.piecewise(breakpoints, values)
    except WeightParseError:
        raise
    except (ValueError, TypeError) as exc:
        raise WeightParseError(f"bad weight spec {spec!r}: {exc}") from None
    raise WeightParseError(f"unknown weight family {kind!r}")


# -- deterministic JSON -----------------------------------------------------


def _json(obj):
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        import json
        return json.dumps(obj)
    if isinstance(obj, dict):
        import json
        items = (f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _emit(report, args):
    if args.format == "csv":
        text = _report_csv(report)
    else:
        text = _json(report) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_csv(report):
    rows = report["results"].get("rows")
    if rows:
        keys = list(rows[0].keys())
        lines = [",".join(keys)]
        for row in rows:
            lines.append(",".join(_json(row.get(k)) for k in keys))
        return "\n".join(lines) + "\n"
    lines = ["key,value"]
    for k, v in report["results"].items():
        lines.append(f"{k},{_json(v)}")
    return "\n".join(lines) + "\n"


def _flt(x):
    return None if x is None else float(x)


# -- command handlers --------------------------------------------------------


def _cmd_bound(args):
    if args.gamma is not None:
        pair = sharpness.PowerWeightPair.create(parse_weight(args.gamma),
                                                args.p, args.q)
        return {"bound": sharpness.bound_power(pair), "formula": "power",
                "M": pair.M, "p": pair.p, "q": pair.q}
    a = parse_weight(args.a)
    b = parse_weight(args.b)
    return {"bound": sharpness.bound_general(a, b), "formula": "general"}


def _cmd_solve(args):
    a = parse_weight(args.a)
    b = parse_weight(args.b)
    if args.n_list:
        res = spectral.converge(a, b, args.n_list)
        return {"constant": res.constant, "lambda1": res.lambda1,
                "estimated_order": _flt(res.estimated_order),
                "constraint_residual": res.residual,
                "convergence_table": [list(row) for row in res.history]}
    res = spectral.best_constant(a, b, args.n)
    return {"constant": res.constant, "lambda1": res.lambda1,
            "nodes": res.n, "constraint_residual": res.residual}


def _cmd_extremal(args):
    if args.family == "ps":
        profile = sharpness.extremal_fn_ps(args.L)
    else:
        profile = sharpness.extremal_fn_pq(args.M, args.p, args.q,
                                           mu_mode=args.mu_mode)
    theta = np.arange(args.samples) * (TWO_PI / args.samples)
    wv = np.asarray(profile.weight.eval(theta))
    fv = np.asarray(profile.fn(theta))
    csv_path = (args.out or "extremal") + ".fn.csv"
    with open(csv_path, "w") as fh:
        fh.write("theta,weight,extremal_fn\n")
        for t, w, f in zip(theta, wv, fv):
            fh.write(f"{t:.17g},{w:.17g},{f:.17g}\n")
    return {"family": args.family,
            "constants": {k: (v if isinstance(v, str) else float(v))
                          for k, v in profile.constants.items()},
            "samples": args.samples, "csv": csv_path}


def _cmd_verify(args):
    pair = sharpness.PowerWeightPair.create(parse_weight(args.gamma),
                                            args.p, args.q)
    report = sharpness.verify_sharpness(pair, n=args.n)
    is_sharp, phase, residual = sharpness.sharpness_characterization(
        pair.a, pair.b, n=args.n, cross_check=False)
    results = {"bound": report.bound, "computed": report.computed,
               "relative_gap": report.relative_gap, "sharp": report.sharp,
               "estimated_order": _flt(report.estimated_order),
               "characterization": {"is_sharp": is_sharp, "phase": phase,
                                    "residual": residual}}
    if pair.p + pair.q > 0:
        results["c_pq"] = transform.c_pq(pair.M, pair.p, pair.q)
        results["mu"] = sharpness.mu_constant(pair.M, pair.p, pair.q,
                                              args.mu_mode)
    return results


def _cmd_sweep(args):
    rows = []
    if args.L_list:
        for L in args.L_list:
            pair = sharpness.PowerWeightPair.create(
                sharpness.extremal_weight_ps(L), 1.0, 1.0)
            rep = sharpness.verify_sharpness(pair, n=args.n)
            rows.append({"L": L, "bound": rep.bound,
                         "computed": rep.computed,
                         "relative_gap": rep.relative_gap,
                         "sharp": rep.sharp})
    for M, p, q in itertools.product(args.M_list or [],
                                     args.p_list or [],
                                     args.q_list or []):
        row = {"M": M, "p": p, "q": q}
        try:
            if args.gamma_family == "sine":
                gamma = sine_family(M)
            else:
                gamma = sharpness.extremal_weight_pq(M, p, q).weight
            pair = sharpness.PowerWeightPair.create(gamma, p, q)
            rep = sharpness.verify_sharpness(pair, n=args.n)
            row.update(bound=rep.bound, computed=rep.computed,
                       relative_gap=rep.relative_gap, sharp=rep.sharp)
        except ValueError as exc:
            row["error"] = str(exc)
        rows.append(row)
    return {"rows": rows}


def _cmd_transform_check(args):
    a = parse_weight(args.a)
    b = parse_weight(args.b)
    cov = transform.build_cov(a, b)
    residuals = transform.substitution_check(cov, np.sin, np.cos)

    rng = np.random.default_rng(args.seed)
    probes = rng.uniform(-TWO_PI, 2 * TWO_PI, size=1000)
    cases = []
    worst = 0.0
    for _ in range(args.count):
        M = float(rng.uniform(1.5, 10.0))
        while True:
            p = float(rng.uniform(-2.0, 2.0))
            q = float(rng.uniform(-2.0, 2.0))
            if p + q > 0.1:
                break
        h = transform.h_pq(M, p, q)
        hinv = transform.h_pq_inv(M, p, q)
        rt = float(np.max(np.abs(hinv(h(probes)) - probes)))
        lift = float(np.max(np.abs(h(probes + TWO_PI) - h(probes) - TWO_PI)))
        worst = max(worst, rt, lift)
        cases.append({"M": M, "p": p, "q": q,
                      "roundtrip_error": rt, "lift_error": lift})
    inv_err = float(np.max(np.abs(cov.inverse(cov.forward(probes)) - probes)))
    return {"c": cov.c,
            "substitution_residuals": list(residuals),
            "cov_roundtrip_error": inv_err,
            "h_pq_cases": cases,
            "h_pq_worst_error": worst}


# -- argument parsing ---------------------------------------------------------


def _float_list(text):
    return [float(tok) for tok in text.split(",") if tok]


def _int_list(text):
    return [int(tok) for tok in text.split(",") if tok]


def build_parser():
    default_n = int(os.environ.get("WIRTINGER_DEFAULT_N", "2048"))
    parser = argparse.ArgumentParser(
        prog="wirtinger",
        description="Best constants in weighted Wirtinger inequalities: "
                    "sharp bounds, spectral solves, extremal profiles.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report to this path")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized probe grids")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", parents=[common],
                             help="evaluate a closed-form bound")
    p_bound.add_argument("--a")
    p_bound.add_argument("--b")
    p_bound.add_argument("--gamma")
    p_bound.add_argument("--p", type=float)
    p_bound.add_argument("--q", type=float)

    p_solve = sub.add_parser("solve", parents=[common], help="spectral best constant")
    p_solve.add_argument("--a", required=True)
    p_solve.add_argument("--b", required=True)
    p_solve.add_argument("--n", type=int, default=default_n)
    p_solve.add_argument("--n-list", type=_int_list, default=None)

    p_ext = sub.add_parser("extremal", parents=[common], help="dump an extremal profile")
    p_ext.add_argument("--family", choices=["ps", "pq"], required=True)
    p_ext.add_argument("--L", type=float, default=4.0)
    p_ext.add_argument("--M", type=float, default=4.0)
    p_ext.add_argument("--p", type=float, default=1.0)
    p_ext.add_argument("--q", type=float, default=1.0)
    p_ext.add_argument("--mu-mode", default="continuity_corrected",
                       choices=["continuity_corrected", "paper_literal"])
    p_ext.add_argument("--samples", type=int, default=2048)

    p_ver = sub.add_parser("verify", parents=[common], help="verify sharpness of the bound")
    p_ver.add_argument("--gamma", required=True)
    p_ver.add_argument("--p", type=float, required=True)
    p_ver.add_argument("--q", type=float, required=True)
    p_ver.add_argument("--n", type=int, default=default_n)
    p_ver.add_argument("--mu-mode", default="continuity_corrected",
                       choices=["continuity_corrected", "paper_literal"])

    p_sweep = sub.add_parser("sweep", parents=[common], help="Cartesian parameter sweep")
    p_sweep.add_argument("--M-list", type=_float_list, default=None)
    p_sweep.add_argument("--p-list", type=_float_list, default=None)
    p_sweep.add_argument("--q-list", type=_float_list, default=None)
    p_sweep.add_argument("--L-list", type=_float_list, default=None)
    p_sweep.add_argument("--gamma-family", choices=["bar", "sine"],
                         default="bar")
    p_sweep.add_argument("--n", type=int, default=default_n)

    p_tc = sub.add_parser("transform-check", parents=[common],
                          help="substitution identities and map round trips")
    p_tc.add_argument("--a", required=True)
    p_tc.add_argument("--b", required=True)
    p_tc.add_argument("--count", type=int, default=10)

    return parser


_HANDLERS = {
    "bound": _cmd_bound,
    "solve": _cmd_solve,
    "extremal": _cmd_extremal,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "transform-check": _cmd_transform_check,
}


def run(args):
    """Dispatch a parsed config to its handler and wrap the report."""
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("out", "format") and v is not None}
    start = time.perf_counter()
    results = _HANDLERS[args.command](args)
    elapsed = time.perf_counter() - start
    # wall time goes to stderr so reports stay byte-identical across runs
    print(f"wall-time: {elapsed:.3f}s", file=sys.stderr)
    return {"schema": SCHEMA_VERSION, "version": __version__,
            "command": args.command, "params": params, "results": results}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bound" and args.gamma is None and (
            args.a is None or args.b is None):
        parser.error("bound needs either --gamma/--p/--q or --a and --b")
    try:
        report = run(args)
    except WeightParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    _emit(report, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
