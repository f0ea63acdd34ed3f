"""Command-line interface.

Exit codes: 0 success, 1 validation/usage error, 2 accuracy or solver
failure, 3 at least one inequality check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import time

import numpy as np

from .errors import (AccuracyError, DomainError, ResourceError,
                     SingularityError, SolverError, ValidationError)
from .gapset import GapSet, cantor_set, finite_gap_set, infinite_band_set
from .jacobi import JacobiCoeffs, gap_eigenvalues, stieltjes_coefficients
from .potential import green_value, robin_capacity, solve_equilibrium, green_function
from .reflmeasure import ReflectionlessMeasure, refl_estimate_check, total_mass
from . import ltverify as lt
from . import suites as suites_mod

SCHEMA = "gapspec/1"


# -- deterministic JSON with 17 significant digits -----------------------------

def _fmt_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def dumps(obj, indent=0):
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  "{k}": {dumps(v, indent + 2).lstrip()}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        obj = list(np.asarray(obj).tolist()) if isinstance(obj, np.ndarray) else list(obj)
        if not obj:
            return "[]"
        items = [f"{pad}  {dumps(v, indent + 2).lstrip()}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    s = str(obj).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


# -- argument helpers -----------------------------------------------------------

def parse_epsilons(spec):
    """Schedules: geometric:r:K, harmonic:K, or list:v1,v2,..."""
    parts = spec.split(":")
    if parts[0] == "geometric" and len(parts) == 3:
        r, K = float(parts[1]), int(parts[2])
        return [r ** k for k in range(1, K + 1)]
    if parts[0] == "harmonic" and len(parts) == 2:
        return [1.0 / (k + 1) for k in range(1, int(parts[1]) + 1)]
    if parts[0] == "list" and len(parts) == 2:
        return [float(v) for v in parts[1].split(",")]
    raise ValidationError(
        f"bad eps schedule {spec!r}: use geometric:r:K, harmonic:K, or list:v1,v2,...")


def _floats(s):
    return [float(v) for v in s.split(",")] if s else []


def build_set(args):
    kind = args.kind
    if kind == "finite":
        if not args.bands:
            raise ValidationError("finite sets need --bands 'lo,hi;lo,hi;...'")
        bands = [[float(v) for v in pair.split(",")] for pair in args.bands.split(";")]
        return finite_gap_set(bands)
    if args.eps is None:
        raise ValidationError(f"{kind} sets need --eps")
    eps = parse_epsilons(args.eps)
    outer = (args.outer[0], args.outer[1])
    if kind == "infinite_band":
        return infinite_band_set(eps, outer)
    if kind == "cantor":
        return cantor_set(eps, outer)
    raise ValidationError(f"unknown set kind {kind!r}")


def build_measure(E, gamma_spec):
    if gamma_spec == "equilibrium":
        return solve_equilibrium(E).base
    if gamma_spec.startswith("list:"):
        return ReflectionlessMeasure(E, _floats(gamma_spec[5:]))
    return ReflectionlessMeasure.from_rule(E, gamma_spec)


def _add_set_args(p):
    p.add_argument("--kind", choices=["finite", "infinite_band", "cantor"],
                   default="finite")
    p.add_argument("--bands", help="finite bands as 'lo,hi;lo,hi;...'")
    p.add_argument("--outer", nargs=2, type=float, default=[-2.0, 2.0])
    p.add_argument("--eps", help="geometric:r:K | harmonic:K | list:v1,v2,...")


def _add_out_args(p):
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--output", help="write report to this path instead of stdout")


def _emit(args, payload, csv_rows=None):
    if args.format == "csv":
        if csv_rows is None:
            raise ValidationError("csv output is not available for this subcommand")
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(csv_rows[0])
        for row in csv_rows[1:]:
            w.writerow([_fmt_float(v) if isinstance(v, float) else v for v in row])
        text = buf.getvalue()
    else:
        text = dumps({"schema": SCHEMA, **payload}) + "\n"
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


# -- subcommand implementations --------------------------------------------------

def cmd_set(args):
    E = build_set(args)
    _emit(args, {
        "set": E.to_descriptor(),
        "n_bands": E.n_bands,
        "n_gaps": E.n_gaps,
        "bands": E.bands,
        "gaps": E.gaps,
        "gap_levels": [int(v) for v in E.gap_levels],
        "lebesgue_measure": E.lebesgue_measure(),
    })
    return 0


def cmd_measure(args):
    E = build_set(args)
    mu = build_measure(E, args.gamma)
    _emit(args, {
        "set": E.to_descriptor(),
        "gamma": mu.gamma,
        "total_mass": total_mass(mu),
    })
    return 0


def cmd_equilibrium(args):
    E = build_set(args)
    eq = solve_equilibrium(E, tol=args.tol)
    _emit(args, {
        "set": E.to_descriptor(),
        "gamma": eq.gamma,
        "residuals": eq.residuals,
    })
    return 0


def cmd_green(args):
    E = build_set(args)
    G = green_function(E)
    xs = _floats(args.x)
    _emit(args, {
        "set": E.to_descriptor(),
        "robin_constant": G.robin_constant,
        "capacity": G.capacity,
        "points": xs,
        "green_values": [green_value(G, x) for x in xs],
    })
    return 0


def cmd_coeffs(args):
    E = build_set(args)
    mu = build_measure(E, args.gamma)
    J = stieltjes_coefficients(mu, args.N)
    _emit(args, {
        "set": E.to_descriptor(),
        "N": args.N,
        "a": J.a,
        "b": J.b,
    })
    return 0


def cmd_spectrum(args):
    E = build_set(args)
    mu = build_measure(E, args.gamma)
    J = stieltjes_coefficients(mu, 2 * args.N)
    evs = gap_eigenvalues(J, E, args.N, args.tol,
                          _floats(args.delta_a), _floats(args.delta_b))
    _emit(args, {
        "set": E.to_descriptor(),
        "N": args.N,
        "eigenvalues": evs,
        "distances": [E.dist(l) for l in evs],
    })
    return 0


def cmd_verify(args):
    E = build_set(args)
    seed = args.seed
    da, db = _floats(args.delta_a), _floats(args.delta_b)
    reports = []
    extra = {}
    if args.ineq in ("thm1", "thm2", "green", "kato"):
        mu = solve_equilibrium(E).base
        J = stieltjes_coefficients(mu, 2 * args.N)
        if args.ineq == "kato":
            tol = 1e-8 * max(1.0, E.diameter)
            evs, evs_half = lt.eigenvalue_data(J, E, args.N, tol, da, db)
            lhs = lt.s_p(evs, E, 1.0)
            slack = max(1e-6, abs(lhs - lt.s_p(evs_half, E, 1.0)))
            rhs = lt.kato_rhs(da, db)
            reports.append(lt.BoundReport(
                "kato", lhs, rhs, 1.0,
                lhs / rhs if rhs > 0 else 0.0,
                bool(lhs <= rhs * (1 + 1e-12) + slack), {"N": args.N}))
        else:
            fit = lt.fit_gap_constants(mu, grid=10)
            if args.ineq == "thm1":
                reports.append(lt.verify_trace_class_bound(
                    J, da, db, args.p, E, args.N, fit))
            elif args.ineq == "thm2":
                reports.append(lt.verify_schatten_bound(
                    J, da, db, args.p, E, args.N, fit))
            else:
                G = green_function(E)
                reports.append(lt.verify_green_bound(
                    J, da, db, args.p, G, E, args.N, fit))
    elif args.ineq == "bs":
        if args.interval is None:
            raise ValidationError("--ineq bs needs --interval 'lo,hi'")
        mu = solve_equilibrium(E).base
        J = stieltjes_coefficients(mu, args.N)
        lo, hi = _floats(args.interval)
        chk = lt.birman_schwinger_check(J, da, db, (lo, hi), N=args.N)
        reports.append(lt.BoundReport(
            "birman_schwinger", float(chk["count"]), chk["bound"], 1.0,
            chk["count"] / chk["bound"] if chk["bound"] > 0 else 0.0,
            chk["pass"], {"interval": [lo, hi], "N": args.N}))
    elif args.ineq == "refl":
        rng = np.random.default_rng(seed)
        if E.n_gaps == 0:
            raise ValidationError("refl check needs a set with inner gaps")
        gaps = E.gaps
        gamma = gaps[:, 0] + rng.random(E.n_gaps) * (gaps[:, 1] - gaps[:, 0])
        mu = ReflectionlessMeasure(E, gamma)
        if args.x is not None:
            x = float(args.x)
        else:
            j = int(rng.integers(0, E.n_gaps))
            x = gaps[j, 0] + rng.uniform(0.05, 0.95) * (gaps[j, 1] - gaps[j, 0])
        chk = refl_estimate_check(mu, x)
        reports.append(lt.BoundReport(
            "refl_estimate", chk["lhs"], chk["rhs"], chk["Ck"], chk["ratio"],
            bool(chk["ratio"] <= 1.0 + 1e-7), {"x": x}))
    elif args.ineq == "lemma":
        rng = np.random.default_rng(seed)
        gaps = E.gaps
        if args.x is not None:
            x = float(args.x)
        else:
            j = int(rng.integers(0, E.n_gaps))
            x = gaps[j, 0] + rng.uniform(0.05, 0.95) * (gaps[j, 1] - gaps[j, 0])
        gamma = gaps[:, 0] + rng.random(E.n_gaps) * (gaps[:, 1] - gaps[:, 0])
        chk = lt.cantor_lemma_products(E, x, gamma)
        worst = max(
            [rc["product"] / rc["bound"] for rc in chk["R"]]
            + [chk["A_product"] / chk["A_bound"], chk["Q"] / chk["Q_bound"]])
        reports.append(lt.BoundReport(
            "cantor_lemma_products", worst, 1.0, 1.0, worst, chk["pass"],
            {"x": x, "level": chk["level"], "n_R_checks": len(chk["R"])}))
        extra["detail"] = {"A_product": chk["A_product"],
                           "A_bound": chk["A_bound"],
                           "Q": chk["Q"], "Q_bound": chk["Q_bound"]}
    else:
        raise ValidationError(f"unknown inequality {args.ineq!r}")

    rows = [["name", "lhs", "rhs", "ratio", "pass", "N", "p", "seed"]]
    for r in reports:
        rows.append([r.name, r.lhs, r.rhs, r.ratio, r.passed,
                     args.N, args.p, seed])
    _emit(args, {"reports": [r.as_dict() for r in reports], **extra},
          csv_rows=rows)
    return 0 if all(r.passed for r in reports) else 3


def cmd_reproduce(args):
    if args.suite not in suites_mod.SUITES:
        sys.stderr.write(f"unknown suite {args.suite!r}; choose from "
                         f"{sorted(suites_mod.SUITES)}\n")
        return 1
    t0 = time.time()
    result = suites_mod.run_suite(args.suite, seed=args.seed)
    runtime = time.time() - t0
    s = result["summary"]
    if args.format == "json":
        _emit(args, {"suite": args.suite, "seed": args.seed, **result})
    else:
        rows = [["suite", "total", "passed", "worst_ratio", "runtime_s"],
                [args.suite, s["total"], s["passed"], s["worst_ratio"],
                 runtime]]
        _emit(args, {}, csv_rows=rows)
    if args.format == "json":
        sys.stderr.write(
            f"{args.suite}: {s['passed']}/{s['total']} pass, "
            f"worst ratio {s['worst_ratio']:.6g}, {runtime:.1f}s\n")
    return 0 if s["passed"] == s["total"] else 3


# -- parser and dispatch -----------------------------------------------------------

def make_parser():
    p = argparse.ArgumentParser(
        prog="gapspec",
        description="Spectral sets, reflectionless measures, and eigenvalue "
                    "inequality verification for Jacobi operators.")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("set", help="construct a gap set")
    _add_set_args(sp); _add_out_args(sp)

    sp = sub.add_parser("measure", help="reflectionless measure on a set")
    _add_set_args(sp); _add_out_args(sp)
    sp.add_argument("--gamma", default="midpoint",
                    help="midpoint|alpha|beta|equilibrium|list:v1,v2,...")

    sp = sub.add_parser("equilibrium", help="equilibrium measure gamma vector")
    _add_set_args(sp); _add_out_args(sp)
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = sub.add_parser("green", help="Green function, Robin constant, capacity")
    _add_set_args(sp); _add_out_args(sp)
    sp.add_argument("--x", default="", help="comma-separated evaluation points")

    sp = sub.add_parser("coeffs", help="Jacobi recurrence coefficients")
    _add_set_args(sp); _add_out_args(sp)
    sp.add_argument("--gamma", default="equilibrium")
    sp.add_argument("-N", type=int, default=50)

    sp = sub.add_parser("spectrum", help="gap eigenvalues of a perturbed truncation")
    _add_set_args(sp); _add_out_args(sp)
    sp.add_argument("--gamma", default="equilibrium")
    sp.add_argument("-N", type=int, default=200)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--delta-a", default="", help="comma-separated values")
    sp.add_argument("--delta-b", default="", help="comma-separated values")

    sp = sub.add_parser("verify", help="check one inequality")
    _add_set_args(sp); _add_out_args(sp)
    sp.add_argument("--ineq", required=True,
                    choices=["thm1", "thm2", "green", "kato", "bs", "refl", "lemma"])
    sp.add_argument("-p", type=float, default=0.75)
    sp.add_argument("-N", type=int, default=200)
    sp.add_argument("--delta-a", default="")
    sp.add_argument("--delta-b", default="")
    sp.add_argument("--interval", help="'lo,hi' for the counting check")
    sp.add_argument("--x", type=float)
    sp.add_argument("--seed", type=int, default=7)

    sp = sub.add_parser("reproduce", help="run a named verification suite")
    sp.add_argument("suite")
    sp.add_argument("--seed", type=int, default=7)
    _add_out_args(sp)
    return p


_DISPATCH = {
    "set": cmd_set,
    "measure": cmd_measure,
    "equilibrium": cmd_equilibrium,
    "green": cmd_green,
    "coeffs": cmd_coeffs,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "reproduce": cmd_reproduce,
}


def _apply_thread_cap():
    cap = os.environ.get("GAPSPEC_THREADS")
    if not cap:
        return
    try:
        import numba
        numba.set_num_threads(max(1, min(int(cap), numba.get_num_threads())))
    except (ImportError, ValueError):
        pass


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    _apply_thread_cap()
    try:
        return _DISPATCH[args.cmd](args)
    except (ValidationError, DomainError, ResourceError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    except (AccuracyError, SolverError, SingularityError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
