"""Acceptance gate: twelve end-to-end criteria, each printing one
pass/fail line.  Timed criteria measure work only (JIT warmup happens in
the session fixture)."""

import math
import time

import numpy as np
import pytest

from gapspec.gapset import cantor_set, finite_gap_set, infinite_band_set
from gapspec.jacobi import (JacobiCoeffs, gap_eigenvalues, rank_one_secular,
                            stieltjes_coefficients)
from gapspec.potential import green_function, green_value, robin_capacity, \
    solve_equilibrium
from gapspec.reflmeasure import (ReflectionlessMeasure, density, m_value,
                                 total_mass)
from gapspec import suites

FREE = finite_gap_set([[-2.0, 2.0]])


def report(num, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {num:02d} {status}: {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def free_coeffs(n):
    a = np.ones(n - 1)
    a[0] = math.sqrt(2.0)
    return JacobiCoeffs(a, np.zeros(n))


def test_criterion_01_sandwich_trace_norm():
    t0 = time.time()
    r = suites.suite_sandwich_trace(seed=7, instances=200)
    dt = time.time() - t0
    s = r["summary"]
    ok = s["passed"] == s["total"] == 200 and dt < 10.0
    report(1, ok, f"{s['passed']}/200 trace-norm bounds hold, "
                  f"worst ratio {s['worst_ratio']:.4f}, {dt:.1f}s")


def test_criterion_02_gap_envelope_estimate():
    t0 = time.time()
    r = suites.suite_gap_estimate(seed=7, samples=100, max_gaps=6, rtol=1e-9)
    dt = time.time() - t0
    s = r["summary"]
    ok = s["passed"] == s["total"] == 600 and dt < 60.0
    report(2, ok, f"{s['passed']}/600 gap estimates hold, "
                  f"worst ratio {s['worst_ratio']:.4f}, {dt:.1f}s")


def test_criterion_03_closed_form_oracles():
    mu = ReflectionlessMeasure(FREE, np.empty(0))
    errs = {}
    # m on the free set against the explicit square-root formula
    zs = np.concatenate([
        np.linspace(2.05, 8.0, 40) + 0.0j,
        -np.linspace(2.05, 8.0, 30) + 0.0j,
        np.linspace(-3.0, 3.0, 30) + 1.0j,
    ])
    m_err = max(abs(m_value(mu, z)
                    - (-1.0 / (np.sqrt(z - 2.0) * np.sqrt(z + 2.0))))
                for z in zs)
    errs["m"] = (m_err, 1e-12)
    # Green function of the free set
    G = green_function(FREE)
    g_err = max(abs(green_value(G, x)
                    - math.log((abs(x) + math.sqrt(x * x - 4.0)) / 2.0))
                for x in np.concatenate([np.linspace(2.01, 9, 25),
                                         -np.linspace(2.01, 9, 25)]))
    errs["green"] = (g_err, 1e-8)
    # capacities
    cap1 = robin_capacity(solve_equilibrium(finite_gap_set([[0.0, 1.0]])))
    errs["cap_interval"] = (abs(cap1["capacity"] - 0.25), 1e-8)
    cap2 = robin_capacity(solve_equilibrium(
        finite_gap_set([[-2.0, -1.0], [1.0, 2.0]])))
    errs["cap_two_band"] = (abs(cap2["capacity"] - math.sqrt(3.0) / 2.0), 1e-7)
    # arcsine density
    d_err = max(abs(density(mu, x) - 1.0 / (math.pi * math.sqrt(4 - x * x)))
                for x in np.linspace(-1.95, 1.95, 50))
    errs["density"] = (d_err, 1e-10)
    ok = all(e <= tol for e, tol in errs.values())
    detail = ", ".join(f"{k} err {e:.2e} (tol {tol:g})"
                       for k, (e, tol) in errs.items())
    report(3, ok, detail)


def test_criterion_04_normalization():
    rng = np.random.default_rng(7)
    families = [
        finite_gap_set([[-2.0, -1.2], [-0.8, 0.1], [0.5, 1.1], [1.4, 2.0]]),
        infinite_band_set([2.0 ** -k for k in range(1, 11)], (0.0, 1.0)),
        cantor_set([3.0 ** -k for k in range(1, 9)], (-1.0, 1.0)),
    ]
    worst = 0.0
    for E in families:
        gaps = E.gaps
        for _ in range(20):
            gamma = gaps[:, 0] + rng.random(E.n_gaps) * (gaps[:, 1] - gaps[:, 0])
            mu = ReflectionlessMeasure(E, gamma)
            worst = max(worst, abs(total_mass(mu) - 1.0))
    ok = worst <= 1e-8
    report(4, ok, f"60 random measures, worst |mass-1| = {worst:.2e}")


def test_criterion_05_stieltjes_oracle():
    mu = ReflectionlessMeasure(FREE, np.empty(0))
    J = stieltjes_coefficients(mu, 20)
    a_err = max(abs(J.a[0] - math.sqrt(2.0)),
                float(np.max(np.abs(J.a[1:] - 1.0))))
    b_err = float(np.max(np.abs(J.b)))
    ok = a_err <= 1e-8 and b_err <= 1e-10
    report(5, ok, f"arcsine coefficients: a err {a_err:.2e}, b err {b_err:.2e}")


def test_criterion_06_rank_one_cross_validation():
    mu = ReflectionlessMeasure(FREE, np.empty(0))
    J = free_coeffs(1600)
    root = rank_one_secular(mu, -1.0)[0]
    worst = abs(root - (-math.sqrt(5.0)))
    ev = gap_eigenvalues(J, FREE, 800, 1e-10, None, [-1.0])
    worst = max(worst, abs(root - ev[0]))
    rng = np.random.default_rng(7)
    for _ in range(20):
        db = float(rng.uniform(0.3, 3.0) * rng.choice([-1.0, 1.0]))
        roots = rank_one_secular(mu, db)
        evs = gap_eigenvalues(J, FREE, 800, 1e-10, None, [db])
        assert len(roots) == len(evs) == 1
        worst = max(worst, abs(roots[0] - evs[0]))
    ok = worst <= 1e-6
    report(6, ok, f"secular vs truncation roots, worst diff {worst:.2e}")


def test_criterion_07_eigenvalue_sum_bounds():
    t0 = time.time()
    r1 = suites.suite_trace_class(seed=7, n_pert=50, N=800)
    r2 = suites.suite_schatten(seed=7, n_pert=50, N=800)
    dt = time.time() - t0
    s1, s2 = r1["summary"], r2["summary"]
    ok = (s1["passed"] == s1["total"] == 450
          and s2["passed"] == s2["total"] == 450 and dt < 300.0)
    report(7, ok, f"trace {s1['passed']}/450 (worst {s1['worst_ratio']:.3f}), "
                  f"power {s2['passed']}/450 (worst {s2['worst_ratio']:.3f}), "
                  f"{dt:.0f}s")


def test_criterion_08_birman_schwinger():
    r = suites.suite_birman_schwinger(seed=7, instances=200)
    s = r["summary"]
    nonzero = sum(1 for i in r["instances"] if i["count"] > 0)
    ok = s["passed"] == s["total"] == 200
    report(8, ok, f"{s['passed']}/200 counting bounds hold "
                  f"({nonzero} with nonzero counts)")


def test_criterion_09_envelope_constants_and_converse():
    band = suites.suite_band_envelope(Ks=range(6, 13))
    cant = suites.suite_cantor_envelope(Ks=range(6, 13))
    conv = suites.suite_converse(Ks=range(6, 15))
    ok = (band["summary"]["spread"] < 10.0
          and cant["summary"]["spread"] < 10.0
          and conv["summary"]["passed"] == conv["summary"]["total"])
    report(9, ok, f"fitted spread band {band['summary']['spread']:.2f}, "
                  f"cantor {cant['summary']['spread']:.2f}; converse "
                  f"strictly increasing in {conv['summary']['total']} steps")


def test_criterion_10_green_function_bounds():
    r1 = suites.suite_green_band(seed=7, n_pert=50)
    r2 = suites.suite_green_cantor(seed=7, n_pert=50)
    s1, s2 = r1["summary"], r2["summary"]
    ok = (s1["passed"] == s1["total"] == 50
          and s2["passed"] == s2["total"] == 50)
    report(10, ok, f"band {s1['passed']}/50 (worst {s1['worst_ratio']:.3f}), "
                   f"cantor {s2['passed']}/50 (worst {s2['worst_ratio']:.3f})")


def test_criterion_11_product_lemmas():
    r = suites.suite_lemma_products(seed=7, samples=100)
    s = r["summary"]
    ok = s["passed"] == s["total"] == 100
    report(11, ok, f"{s['passed']}/100 samples, all products within their "
                   f"exponential bounds (worst ratio {s['worst_ratio']:.6f})")


def test_criterion_12_dual_eigensolvers():
    r = suites.suite_eigensolver_agreement(seed=7, instances=100)
    s = r["summary"]
    worst = max(i["max_diff"] for i in r["instances"])
    ok = s["passed"] == s["total"] == 100
    report(12, ok, f"{s['passed']}/100 sections agree to 1e-10 "
                   f"(worst {worst:.2e})")
