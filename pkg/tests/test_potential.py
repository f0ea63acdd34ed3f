import math

import numpy as np
import pytest

from gapspec.errors import DomainError, ValidationError
from gapspec.gapset import cantor_set, finite_gap_set, infinite_band_set
from gapspec.potential import (green_function, green_sqrt_bound_check,
                               green_value, robin_capacity, solve_equilibrium)
from gapspec.reflmeasure import density


def test_equilibrium_free_is_arcsine():
    E = finite_gap_set([[-2.0, 2.0]])
    eq = solve_equilibrium(E)
    assert eq.gamma.size == 0
    for x in [-1.7, 0.0, 1.3]:
        assert density(eq.base, x) == pytest.approx(
            1.0 / (math.pi * math.sqrt(4.0 - x * x)), rel=1e-12)


def test_equilibrium_symmetric_two_band():
    E = finite_gap_set([[-2.0, -1.0], [1.0, 2.0]])
    eq = solve_equilibrium(E)
    assert eq.gamma[0] == pytest.approx(0.0, abs=1e-12)
    assert np.max(np.abs(eq.residuals)) < 1e-9


def test_equilibrium_residuals_small():
    E = infinite_band_set([2.0 ** -k for k in range(1, 9)], (0.0, 1.0))
    eq = solve_equilibrium(E)
    assert np.max(np.abs(eq.residuals)) < 1e-8


def test_capacity_oracles():
    assert robin_capacity(solve_equilibrium(finite_gap_set([[0.0, 1.0]])))[
        "capacity"] == pytest.approx(0.25, abs=1e-8)
    cap2 = robin_capacity(solve_equilibrium(
        finite_gap_set([[-2.0, -1.0], [1.0, 2.0]])))["capacity"]
    assert cap2 == pytest.approx(math.sqrt(3.0) / 2.0, abs=1e-7)


def test_green_free_closed_form():
    G = green_function(finite_gap_set([[-2.0, 2.0]]))
    for x in [2.1, 3.0, -2.5, -7.0, 10.0]:
        expect = math.log(abs(abs(x) + math.sqrt(x * x - 4.0)) / 2.0)
        assert green_value(G, x) == pytest.approx(expect, abs=1e-8)
    assert green_value(G, 1.0) == 0.0
    # capacity of [-2,2] is 1, robin constant 0
    assert G.capacity == pytest.approx(1.0, abs=1e-9)


def test_green_positive_in_gaps():
    E = finite_gap_set([[-2.0, -1.0], [1.0, 2.0]])
    G = green_function(E)
    for x in [-0.9, 0.0, 0.5, 0.99]:
        assert green_value(G, x) > 0.0
    assert green_value(G, -1.0) == 0.0
    # symmetric set: symmetric Green values
    assert green_value(G, 0.5) == pytest.approx(green_value(G, -0.5), rel=1e-8)


def test_green_sqrt_bound_constants_stable():
    E = infinite_band_set([2.0 ** -k for k in range(1, 8)], (0.0, 1.0))
    G = green_function(E)
    cs = [green_sqrt_bound_check(G, k) for k in range(1, 8)]
    assert all(np.isfinite(cs))
    assert max(cs) / min(cs) < 10.0
    with pytest.raises(ValidationError):
        green_sqrt_bound_check(G, 99)


def test_robin_anchor_validation():
    eq = solve_equilibrium(finite_gap_set([[0.0, 1.0]]))
    with pytest.raises(DomainError):
        robin_capacity(eq, z0=0.5)


def test_cantor_equilibrium_runs():
    E = cantor_set([3.0 ** -k for k in range(1, 6)], (-1.0, 1.0))
    eq = solve_equilibrium(E)
    assert np.max(np.abs(eq.residuals)) < 1e-7
