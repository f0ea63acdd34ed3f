import math

import numpy as np
import pytest

from gapspec.errors import ResourceError, ValidationError
from gapspec.gapset import (GapSet, cantor_set, finite_gap_set,
                            infinite_band_set, set_diagnostics)


def test_finite_set_basic():
    E = finite_gap_set([[-2.0, -1.0], [1.0, 2.0]])
    assert E.n_bands == 2 and E.n_gaps == 1
    assert E.outer_lo == -2.0 and E.outer_hi == 2.0
    assert E.diameter == 4.0
    np.testing.assert_allclose(E.gaps, [[-1.0, 1.0]])
    assert E.lebesgue_measure() == 2.0


def test_finite_set_sorts_bands():
    E = finite_gap_set([[1.0, 2.0], [-2.0, -1.0]])
    assert E.bands[0, 0] == -2.0


@pytest.mark.parametrize("bands", [
    [],
    [[1.0, 1.0]],
    [[2.0, 1.0]],
    [[0.0, 1.0], [0.5, 2.0]],   # overlap
    [[0.0, 1.0], [1.0, 2.0]],   # touching
    [[0.0, np.inf]],
])
def test_invalid_bands_rejected(bands):
    with pytest.raises(ValidationError):
        finite_gap_set(bands)


def test_cantor_counts_and_levels():
    K = 5
    E = cantor_set([0.3] * K, (-1.0, 1.0))
    assert E.n_bands == 2 ** K
    assert E.n_gaps == 2 ** K - 1
    # middle gap has level 1; the level counts double per level
    mid = E.n_gaps // 2
    assert E.gap_levels[mid] == 1
    for k in range(1, K + 1):
        assert len(E.gaps_at_level(k)) == 2 ** (k - 1)


def test_cantor_band_lengths_exact_product():
    eps = [0.5, 0.25, 0.125]
    E = cantor_set(eps, (0.0, 1.0))
    expect = 1.0
    for e in eps:
        expect *= (1.0 - e) / 2.0
    widths = E.bands[:, 1] - E.bands[:, 0]
    np.testing.assert_allclose(widths, expect, rtol=1e-15)


def test_cantor_band_cap():
    with pytest.raises(ResourceError):
        cantor_set([0.1] * 20, (0.0, 1.0), band_cap=1 << 10)


def test_infinite_band_structure():
    eps = [0.5, 0.25, 0.125]
    E = infinite_band_set(eps, (0.0, 1.0))
    assert E.n_bands == len(eps) + 1
    # gap k over previous band length equals eps_k
    b_prev = 1.0
    for k in range(1, len(eps) + 1):
        j = E.gaps_at_level(k)
        assert len(j) == 1
        g = E.gaps[j[0]]
        assert (g[1] - g[0]) / b_prev == pytest.approx(eps[k - 1], rel=1e-14)
        b_prev = (1.0 - eps[k - 1]) * b_prev / 2.0
    # gaps accumulate toward the left endpoint
    assert E.gaps[0, 0] - E.outer_lo < E.gaps[-1, 0] - E.outer_lo


@pytest.mark.parametrize("eps", [[0.0], [1.0], [-0.2], [1.5]])
def test_bad_epsilons(eps):
    with pytest.raises(ValidationError):
        infinite_band_set(eps, (0.0, 1.0))


def test_locate_and_dist():
    E = finite_gap_set([[-2.0, -1.0], [1.0, 2.0]])
    assert E.locate(-1.5).kind == "band"
    loc = E.locate(0.2)
    assert loc.kind == "gap" and loc.index == 0
    assert loc.dist == pytest.approx(0.8)
    assert E.locate(-3.0).kind == "outside-left"
    assert E.locate(5.0).dist == 3.0
    assert E.dist(-1.0) == 0.0
    xs = np.array([-3.0, -1.5, 0.2, 1.0, 5.0])
    np.testing.assert_allclose(E.dist_many(xs), [1.0, 0.0, 0.8, 0.0, 3.0])


def test_descriptor_round_trip():
    for E in [
        finite_gap_set([[-2.0, -1.0], [1.0, 2.0]]),
        infinite_band_set([0.5, 0.25], (0.0, 1.0)),
        cantor_set([0.3, 0.2], (-1.0, 1.0)),
    ]:
        assert GapSet.from_descriptor(E.to_descriptor()) == E


def test_diagnostics():
    E = finite_gap_set([[-2.0, 2.0]])
    d = set_diagnostics(E, [0.1, 1.0])
    assert d["lebesgue_measure"] == 4.0
    assert d["homogeneity_margin"] == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        set_diagnostics(E, [])
    with pytest.raises(ValidationError):
        set_diagnostics(E, [100.0])
