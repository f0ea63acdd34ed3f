"""Seeded, reproducible verification suites.

Each suite builds its own instances from a fixed seed, runs one family of
inequality checks, and returns {"suite", "instances", "summary"}.  The
summary carries pass counts and the worst observed lhs/rhs ratio; wall
time is added by the caller when wanted so that JSON output stays
deterministic.
"""

from __future__ import annotations

import inspect
import json
import math

import numpy as np

from .gapset import GapSet, cantor_set, finite_gap_set, infinite_band_set
from .jacobi import (JacobiCoeffs, eig_tridiag, jacobi_eigh,
                     local_spectral_measure, sandwich_trace_norm,
                     stieltjes_coefficients)
from .potential import green_function, solve_equilibrium
from .reflmeasure import ReflectionlessMeasure, refl_estimate_check
from . import ltverify as lt

DEFAULT_SEED = 7

# canonical sets used across suites
def free_set():
    return finite_gap_set([[-2.0, 2.0]])


def two_band_set():
    return finite_gap_set([[-2.0, -1.0], [1.0, 2.0]])


def standard_infinite_band(K=10):
    return infinite_band_set([2.0 ** -k for k in range(1, K + 1)], (0.0, 1.0))


def standard_green_cantor(K=8):
    return cantor_set([0.9 * 2.0 ** -k for k in range(1, K + 1)], (-1.0, 1.0))


def standard_lemma_cantor(K=8):
    return cantor_set([3.0 ** -k for k in range(1, K + 1)], (-1.0, 1.0))


# -- shared, memoized heavy ingredients ---------------------------------------

_CACHE = {}


def _set_key(E):
    return json.dumps(E.to_descriptor(), sort_keys=True)


def equilibrium_for(E):
    key = ("eq", _set_key(E))
    if key not in _CACHE:
        _CACHE[key] = solve_equilibrium(E)
    return _CACHE[key]


def green_for(E):
    key = ("green", _set_key(E))
    if key not in _CACHE:
        _CACHE[key] = green_function(equilibrium_for(E))
    return _CACHE[key]


def coeffs_for(E, M):
    key = ("coeffs", _set_key(E), M)
    if key not in _CACHE:
        _CACHE[key] = stieltjes_coefficients(equilibrium_for(E).base, M)
    return _CACHE[key]


def constants_for(E, grid=10, per_level_samples=None):
    key = ("fit", _set_key(E), grid, per_level_samples)
    if key not in _CACHE:
        mu = equilibrium_for(E).base
        idx = None
        if per_level_samples is not None:
            picks = []
            levels = sorted(set(int(l) for l in E.gap_levels))
            for k in levels:
                g = E.gaps_at_level(k) if k > 0 else np.nonzero(E.gap_levels == 0)[0]
                sel = np.linspace(0, len(g) - 1, min(per_level_samples, len(g)))
                picks.extend(g[np.unique(sel.round().astype(int))].tolist())
            idx = picks
        _CACHE[key] = lt.fit_gap_constants(mu, grid=grid, gap_indices=idx)
    return _CACHE[key]


def _summary(name, instances, extra=None):
    ratios = [i["ratio"] for i in instances if "ratio" in i and
              math.isfinite(i["ratio"])]
    out = {
        "suite": name,
        "instances": instances,
        "summary": {
            "total": len(instances),
            "passed": sum(1 for i in instances if i["pass"]),
            "worst_ratio": max(ratios) if ratios else 0.0,
        },
    }
    if extra:
        out["summary"].update(extra)
    return out


# -- sandwiched resolvent trace-norm suite ------------------------------------

def suite_sandwich_trace(seed=DEFAULT_SEED, instances=200):
    """Random finite sections: trace norm of sqrt(D) R(x) sqrt(D) versus
    the trace of D times the largest absolute Cauchy transform of the
    site spectral measures."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(instances):
        n = int(rng.integers(5, 41))
        a = rng.uniform(0.3, 1.5, n - 1)
        b = rng.uniform(-1.0, 1.0, n)
        J = JacobiCoeffs(a, b)
        D = rng.uniform(0.0, 1.0, n) * (rng.random(n) < 0.8)
        lam, V = jacobi_eigh(J.dense())
        scale = max(1.0, float(np.abs(lam).max()))
        while True:
            x = rng.uniform(lam[0] - scale, lam[-1] + scale)
            if np.min(np.abs(lam - x)) >= 0.05 * scale:
                break
        lhs = sandwich_trace_norm(J, D, x)
        sup_cauchy = float(np.max(np.sum(V ** 2 / np.abs(lam - x), axis=1)))
        rhs = float(np.sum(D)) * sup_cauchy
        out.append({"i": i, "n": n, "x": x, "lhs": lhs, "rhs": rhs,
                    "ratio": lhs / rhs if rhs > 0 else 0.0,
                    "pass": bool(lhs <= rhs * (1 + 1e-10) + 1e-10 * scale)})
    return _summary("sandwich_trace", out)


# -- reflectionless gap estimate suite ----------------------------------------

def _random_finite_sets(rng, max_gaps=6):
    sets = []
    for g in range(1, max_gaps + 1):
        while True:
            pts = np.sort(rng.uniform(-1.9, 1.9, 2 * g))
            widths = np.diff(np.concatenate([[-2.0], pts, [2.0]]))
            if widths.min() > 0.05:
                break
        bands = [[-2.0, pts[0]]]
        for j in range(1, g):
            bands.append([pts[2 * j - 1], pts[2 * j]])
        bands.append([pts[-1], 2.0])
        sets.append(finite_gap_set(bands))
    return sets


def suite_gap_estimate(seed=DEFAULT_SEED, samples=100, max_gaps=6,
                       rtol=1e-9):
    """Absolute Cauchy integral at gap points versus the per-gap log
    constant times the extremal envelope, over random finite-gap sets."""
    rng = np.random.default_rng(seed)
    out = []
    for E in _random_finite_sets(rng, max_gaps):
        gaps = E.gaps
        for s in range(samples):
            gamma = gaps[:, 0] + rng.random(E.n_gaps) * (gaps[:, 1] - gaps[:, 0])
            j = int(rng.integers(0, E.n_gaps))
            x = gaps[j, 0] + rng.uniform(0.02, 0.98) * (gaps[j, 1] - gaps[j, 0])
            mu = ReflectionlessMeasure(E, gamma)
            chk = refl_estimate_check(mu, x, rtol=rtol)
            out.append({"n_gaps": E.n_gaps, "sample": s, "x": x,
                        "lhs": chk["lhs"], "rhs": chk["rhs"], "Ck": chk["Ck"],
                        "ratio": chk["ratio"],
                        "pass": bool(chk["ratio"] <= 1.0 + 100.0 * rtol)})
    return _summary("gap_estimate", out)


# -- eigenvalue-sum bound suites ----------------------------------------------

def _random_perturbation(rng, J, diam):
    """Finite-support perturbation small enough to keep a + da positive."""
    lb = int(rng.integers(1, 9))
    la = max(lb - 1, 1)
    amp = rng.uniform(0.02, 0.3) * diam / 4.0
    da = amp * rng.uniform(-1.0, 1.0, la)
    db = amp * rng.uniform(-1.0, 1.0, lb)
    amin = float(np.min(J.a[:la]))
    if np.max(np.abs(da)) >= 0.8 * amin:
        da *= 0.8 * amin / np.max(np.abs(da))
    return da, db


def _bound_suite(name, kind, ps, seed, n_pert, N, sets=None):
    reports = []
    if sets is None:
        sets = [free_set(), two_band_set(), standard_infinite_band()]
    for E in sets:
        rng = np.random.default_rng(seed)
        J = coeffs_for(E, 2 * N)
        fit = constants_for(E)
        G = green_for(E) if kind == "green" else None
        gc = lt.green_level_constants(G) if kind == "green" else None
        tol = 1e-8 * max(1.0, E.diameter)
        for i in range(n_pert):
            da, db = _random_perturbation(rng, J, E.diameter)
            data = lt.eigenvalue_data(J, E, N, tol, da, db)
            for p in ps:
                if kind == "trace":
                    r = lt.verify_trace_class_bound(J, da, db, p, E, N, fit,
                                                    eig_data=data)
                elif kind == "schatten":
                    r = lt.verify_schatten_bound(J, da, db, p, E, N, fit,
                                                 eig_data=data)
                else:
                    r = lt.verify_green_bound(J, da, db, p, G, E, N, fit,
                                              green_constants=gc,
                                              eig_data=data)
                reports.append({"set": E.to_descriptor()["kind"], "pert": i,
                                "p": p, "N": N, "lhs": r.lhs, "rhs": r.rhs,
                                "ratio": r.ratio, "pass": r.passed})
    return _summary(name, reports)


def suite_trace_class(seed=DEFAULT_SEED, n_pert=50, N=800,
                      ps=(0.6, 0.75, 0.9)):
    return _bound_suite("trace_class", "trace", ps, seed, n_pert, N)


def suite_schatten(seed=DEFAULT_SEED, n_pert=50, N=800, ps=(1.25, 1.5, 2.0)):
    return _bound_suite("schatten", "schatten", ps, seed, n_pert, N)


def suite_green_band(seed=DEFAULT_SEED, n_pert=50, N=400, p=2.0):
    return _bound_suite("green_band", "green", (p,), seed, n_pert, N,
                        sets=[standard_infinite_band()])


def suite_green_cantor(seed=DEFAULT_SEED, n_pert=50, N=400, p=2.0):
    E = standard_green_cantor()
    fit = constants_for(E, per_level_samples=3)
    G = green_for(E)
    gc = lt.green_level_constants(G)
    J = coeffs_for(E, 2 * N)
    rng = np.random.default_rng(seed)
    tol = 1e-8 * max(1.0, E.diameter)
    reports = []
    for i in range(n_pert):
        da, db = _random_perturbation(rng, J, E.diameter)
        r = lt.verify_green_bound(J, da, db, p, G, E, N, fit,
                                  green_constants=gc)
        reports.append({"set": "cantor", "pert": i, "p": p, "N": N,
                        "lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio,
                        "pass": r.passed})
    return _summary("green_cantor", reports)


# -- Birman-Schwinger counting suite ------------------------------------------

def suite_birman_schwinger(seed=DEFAULT_SEED, instances=200, N=120):
    """Eigenvalue counts in spectral-gap intervals of perturbed two-band
    sections versus the endpoint trace-norm bound."""
    E = two_band_set()
    J = coeffs_for(E, N)
    rng = np.random.default_rng(seed)
    lam = eig_tridiag(J.section(N))
    out = []
    for i in range(instances):
        # large diagonal bumps so eigenvalues actually enter the gap
        lb = int(rng.integers(1, 6))
        la = max(lb - 1, 1)
        db = rng.uniform(-2.5, 2.5, lb)
        da = rng.uniform(-1.0, 1.0, la)
        amin = float(np.min(J.a[:la]))
        if np.max(np.abs(da)) >= 0.8 * amin:
            da *= 0.8 * amin / np.max(np.abs(da))
        for _ in range(200):
            g_lo = rng.uniform(-0.95, 0.5)
            g_hi = g_lo + rng.uniform(0.05, 0.45)
            if g_hi < 0.95 and np.min(np.abs(lam - g_lo)) > 0.01 \
                    and np.min(np.abs(lam - g_hi)) > 0.01 \
                    and not np.any((lam > g_lo) & (lam < g_hi)):
                break
        else:
            continue
        chk = lt.birman_schwinger_check(J, da, db, (g_lo, g_hi), N=N)
        out.append({"i": i, "interval": [g_lo, g_hi], "count": chk["count"],
                    "bound": chk["bound"],
                    "ratio": chk["count"] / chk["bound"] if chk["bound"] > 0 else 0.0,
                    "pass": chk["pass"]})
    return _summary("birman_schwinger", out)


# -- envelope estimates across construction depth ------------------------------

def _envelope_family(make_set, Ks, analytic, max_gaps=4):
    rows = []
    for K in Ks:
        E = make_set(K)
        for k in range(1, K + 1):
            chk = lt.band_cantor_estimate_check(E, k, grid=8, max_gaps=max_gaps)
            rows.append({"K": K, "k": k, "fitted": chk["fitted"],
                         "analytic": analytic(k, E.epsilons[k - 1]),
                         "converse": chk["converse"]})
    fitted = [r["fitted"] for r in rows]
    spread = max(fitted) / min(fitted) if min(fitted) > 0 else math.inf
    for r in rows:
        r["ratio"] = r["fitted"] / r["analytic"]
        r["pass"] = bool(spread < 10.0)
    return rows, spread


def suite_band_envelope(Ks=range(6, 13)):
    """Envelope constant stability for the geometric infinite-band family."""
    rows, spread = _envelope_family(
        lambda K: infinite_band_set([2.0 ** -k for k in range(1, K + 1)], (0.0, 1.0)),
        Ks, lambda k, e: math.sqrt(e) * math.log(1.0 / e))
    return _summary("band_envelope", rows, extra={"spread": spread})


def suite_cantor_envelope(Ks=range(6, 13)):
    """Envelope constant stability for the geometric quarter Cantor family."""
    rows, spread = _envelope_family(
        lambda K: cantor_set([4.0 ** -k for k in range(1, K + 1)], (-1.0, 1.0)),
        Ks, lambda k, e: k * math.sqrt(e) * math.log(1.0 / e))
    return _summary("cantor_envelope", rows, extra={"spread": spread})


def suite_converse(Ks=range(6, 15)):
    """Left-edge converse statistic for the harmonic schedule: it must grow
    without bound because the eps sums diverge."""
    rows = []
    for family, make in (
        ("band", lambda K: infinite_band_set(
            [1.0 / (k + 1) for k in range(1, K + 1)], (0.0, 1.0))),
        ("cantor", lambda K: cantor_set(
            [1.0 / (k + 1) for k in range(1, K + 1)], (-1.0, 1.0))),
    ):
        prev = -math.inf
        for K in Ks:
            E = make(K)
            stat = lt.band_cantor_estimate_check(E, 1, grid=8)["converse"]
            rows.append({"family": family, "K": K, "converse": stat,
                         "pass": bool(stat > prev)})
            prev = stat
    return _summary("converse", rows)


# -- Cantor product lemma suite -------------------------------------------------

def suite_lemma_products(seed=DEFAULT_SEED, samples=100):
    E = standard_lemma_cantor()
    rng = np.random.default_rng(seed)
    gaps = E.gaps
    out = []
    for s in range(samples):
        j = int(rng.integers(0, E.n_gaps))
        x = gaps[j, 0] + rng.uniform(0.02, 0.98) * (gaps[j, 1] - gaps[j, 0])
        gamma = gaps[:, 0] + rng.random(E.n_gaps) * (gaps[:, 1] - gaps[:, 0])
        chk = lt.cantor_lemma_products(E, x, gamma)
        worst = max(
            [rc["product"] / rc["bound"] for rc in chk["R"]]
            + [chk["A_product"] / chk["A_bound"], chk["Q"] / chk["Q_bound"]])
        out.append({"sample": s, "x": x, "level": chk["level"],
                    "n_R_checks": len(chk["R"]), "ratio": worst,
                    "pass": chk["pass"]})
    return _summary("lemma_products", out)


# -- dual eigensolver agreement -------------------------------------------------

def suite_eigensolver_agreement(seed=DEFAULT_SEED, instances=100):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(instances):
        n = int(rng.integers(2, 51))
        J = JacobiCoeffs(rng.uniform(0.2, 2.0, n - 1), rng.uniform(-2.0, 2.0, n))
        lam_b = eig_tridiag(J)
        lam_r, _ = jacobi_eigh(J.dense())
        err = float(np.max(np.abs(lam_b - lam_r)))
        out.append({"i": i, "n": n, "max_diff": err, "ratio": err / 1e-10,
                    "pass": bool(err <= 1e-10)})
    return _summary("eigensolver_agreement", out)


# -- registry used by the command line -----------------------------------------

SUITES = {
    "thm2_1": suite_sandwich_trace,
    "thm2_2": suite_gap_estimate,
    "thm3_1": suite_trace_class,
    "thm3_2": suite_schatten,
    "thm4_1": suite_band_envelope,
    "thm4_2": suite_band_envelope,
    "thm4_3": suite_green_band,
    "thm4_5": suite_cantor_envelope,
    "thm4_9": suite_cantor_envelope,
    "thm4_10": suite_green_cantor,
    "lemmas": suite_lemma_products,
    "converse": suite_converse,
}


def run_suite(name, seed=DEFAULT_SEED):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from "
                         f"{sorted(SUITES)}")
    fn = SUITES[name]
    if "seed" in inspect.signature(fn).parameters:
        return fn(seed=seed)
    return fn()
