import math

import numpy as np
import pytest

from gapspec.errors import (DomainError, SingularityError, ValidationError)
from gapspec.gapset import cantor_set, finite_gap_set, infinite_band_set
from gapspec.jacobi import JacobiCoeffs, stieltjes_coefficients
from gapspec.reflmeasure import ReflectionlessMeasure
from gapspec import ltverify as lt

FREE = finite_gap_set([[-2.0, 2.0]])


def free_coeffs(n):
    a = np.ones(n - 1)
    a[0] = math.sqrt(2.0)
    return JacobiCoeffs(a, np.zeros(n))


def test_frozen_constant_examples():
    assert lt.thm1_constant(0.75, [1.0], FREE) == pytest.approx(
        1.5 / (0.25 * 4.0 ** 0.25), rel=1e-14)
    assert lt.thm2_constant(2.0, [1.0]) == pytest.approx(
        9.0 * math.sqrt(2.0), rel=1e-14)
    assert lt.kato_rhs([0.1], [0.2]) == pytest.approx(0.6)
    assert lt.s_p([3.0, -3.0], FREE, 1.0) == pytest.approx(2.0)
    assert lt.s_p([2.5, 2.25], FREE, 0.5) == pytest.approx(
        math.sqrt(0.5) + 0.5, rel=1e-14)
    assert lt.s_p([], FREE, 0.7) == 0.0


def test_constant_domains():
    with pytest.raises(ValidationError):
        lt.thm1_constant(0.4, [1.0], FREE)
    with pytest.raises(ValidationError):
        lt.thm1_constant(1.2, [1.0], FREE)
    with pytest.raises(ValidationError):
        lt.thm1_constant(0.75, [1.0, 2.0], FREE)
    with pytest.raises(ValidationError):
        lt.thm2_constant(0.9, [1.0])
    with pytest.raises(ValidationError):
        lt.s_p([1.0], FREE, -0.5)


def test_constants_homogeneity():
    # both explicit constants are linear in the per-gap constants
    E = finite_gap_set([[-2.0, -1.0], [1.0, 2.0]])
    C = [0.7, 1.3]
    assert lt.thm1_constant(0.8, np.multiply(C, 3.0), E) == pytest.approx(
        3.0 * lt.thm1_constant(0.8, C, E), rel=1e-14)
    assert lt.thm2_constant(1.5, np.multiply(C, 3.0)) == pytest.approx(
        3.0 * lt.thm2_constant(1.5, C), rel=1e-14)


def test_s_p_monotonicity():
    lhs = lt.s_p([2.5], FREE, 1.0)
    assert lt.s_p([2.5, 3.0], FREE, 1.0) > lhs
    assert lt.s_p([2.5, 1.0], FREE, 1.0) == pytest.approx(lhs)


def test_perturbation_size_crossover():
    # small coupling: the power sum with p=2 is far below the trace-norm
    # size; large coupling reverses the order
    for s, smaller_is_power in [(0.01, True), (10.0, False)]:
        power = lt.perturbation_power_sum([], [s], 2.0)
        trace = lt.kato_rhs([], [s])
        assert (power < trace) is smaller_is_power


def test_fit_gap_constants_arcsine():
    mu = ReflectionlessMeasure(FREE, np.empty(0))
    fit = lt.fit_gap_constants(mu, grid=12)
    assert fit["inner"].size == 0
    assert fit["outer_sqrt"] == pytest.approx(0.5, abs=1e-6)
    assert fit["outer_product"] == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValidationError):
        lt.fit_gap_constants(mu, grid=4)


def test_cauchy_fitter_matches_adaptive():
    from gapspec.reflmeasure import cauchy_abs_integral
    E = finite_gap_set([[-2.0, -1.0], [1.0, 2.0]])
    mu = ReflectionlessMeasure.from_rule(E, "midpoint")
    f = lt._CauchyFitter(mu)
    for x in [0.0, 0.7, -0.95, 2.3]:
        ref = cauchy_abs_integral(mu, x, rtol=1e-10)
        assert f.abs_integral(x) == pytest.approx(ref, rel=1e-7)
    with pytest.raises(DomainError):
        f.abs_integral(1.5)


def test_verify_bounds_zero_perturbation():
    mu = ReflectionlessMeasure(FREE, np.empty(0))
    J = free_coeffs(400)
    fit = lt.fit_gap_constants(mu, grid=10)
    r = lt.verify_trace_class_bound(J, [0.0], [0.0], 0.75, FREE, 200, fit)
    assert r.lhs == 0.0 and r.passed
    r2 = lt.verify_schatten_bound(J, [0.0], [0.0], 2.0, FREE, 200, fit)
    assert r2.lhs == 0.0 and r2.passed


def test_verify_trace_bound_single_site():
    mu = ReflectionlessMeasure(FREE, np.empty(0))
    J = free_coeffs(800)
    fit = lt.fit_gap_constants(mu, grid=10)
    r = lt.verify_trace_class_bound(J, [0.0], [3.0], 0.75, FREE, 400, fit)
    # exact eigenvalue sqrt(13): lhs = (sqrt(13)-2)^{3/4}
    assert r.lhs == pytest.approx((math.sqrt(13.0) - 2.0) ** 0.75, abs=1e-6)
    assert r.passed
    with pytest.raises(ValidationError):
        lt.verify_trace_class_bound(J, [0.0], [3.0], 2.0, FREE, 400, fit)
    with pytest.raises(ValidationError):
        lt.verify_schatten_bound(J, [0.0], [3.0], 0.75, FREE, 400, fit)


def test_bound_report_dict():
    r = lt.BoundReport("x", 1.0, 2.0, 3.0, 0.5, True, {"N": 4})
    d = r.as_dict()
    assert d["pass"] is True and d["lhs"] == 1.0 and d["inputs"]["N"] == 4


def test_birman_schwinger_validation():
    J = free_coeffs(80)
    with pytest.raises(ValidationError):
        lt.birman_schwinger_check(J, [0.0], [1.0], (1.0, -1.0), N=40)
    # interval inside the essential spectrum of the section
    with pytest.raises(ValidationError):
        lt.birman_schwinger_check(J, [0.0], [1.0], (-0.5, 0.5), N=40)
    # endpoint on an unperturbed eigenvalue
    from gapspec.jacobi import eig_tridiag
    lam = eig_tridiag(J.section(40))
    with pytest.raises((SingularityError, ValidationError)):
        lt.birman_schwinger_check(J, [0.0], [1.0], (float(lam[-1]), 5.0), N=40)


def test_birman_schwinger_counts():
    J = free_coeffs(120)
    chk = lt.birman_schwinger_check(J, [0.0], [3.0], (2.5, 4.5), N=120)
    assert chk["count"] == 1
    assert chk["pass"]


def test_band_cantor_estimate_validation():
    E = infinite_band_set([0.5, 0.25], (0.0, 1.0))
    with pytest.raises(ValidationError):
        lt.band_cantor_estimate_check(E, 5)
    with pytest.raises(ValidationError):
        lt.band_cantor_estimate_check(FREE, 1)


def test_cantor_lemma_validation():
    E = cantor_set([1 / 3, 1 / 9, 1 / 27], (-1.0, 1.0))
    gamma = E.gaps.mean(axis=1)
    with pytest.raises(DomainError):
        lt.cantor_lemma_products(E, 0.99, gamma)  # inside a band
    with pytest.raises(ValidationError):
        lt.cantor_lemma_products(FREE, 0.0, np.empty(0))
    Eib = infinite_band_set([0.5, 0.25], (0.0, 1.0))
    with pytest.raises(ValidationError):
        lt.cantor_lemma_products(Eib, 0.4, Eib.gaps.mean(axis=1))


def test_cantor_lemma_products_pass():
    E = cantor_set([3.0 ** -k for k in range(1, 7)], (-1.0, 1.0))
    gamma = E.gaps.mean(axis=1)
    j = E.gaps_at_level(4)[2]
    x = E.gaps[j].mean()
    out = lt.cantor_lemma_products(E, x, gamma)
    assert out["level"] == 4
    assert out["pass"]
    assert out["Q"] <= out["Q_bound"]
    assert out["A_product"] <= out["A_bound"]
    assert all(rc["product"] <= rc["bound"] * (1 + 1e-12) for rc in out["R"])


def test_green_bound_requires_levels():
    mu = ReflectionlessMeasure(FREE, np.empty(0))
    J = free_coeffs(100)
    fit = lt.fit_gap_constants(mu, grid=10)
    with pytest.raises(ValidationError):
        lt.verify_green_bound(J, [0.0], [1.0], 2.0, None, FREE, 50, fit)
