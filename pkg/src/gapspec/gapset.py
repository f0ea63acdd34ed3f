"""Finite-gap, infinite-band, and middle-epsilon Cantor sets on the real line.

A GapSet is a compact interval [outer_lo, outer_hi] minus finitely many
disjoint open gaps.  The two iterative constructions (infinite-band and
Cantor) are built from exact band-length products rather than repeated
subtraction so that tiny bands keep full relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceError, ValidationError

DEFAULT_BAND_CAP = 1 << 16


@dataclass(frozen=True)
class Location:
    """Classification of a point relative to a GapSet.

    kind is one of "band", "gap", "outside-left", "outside-right";
    index is the band or gap index (or -1); level is the construction
    level of the gap when known (else 0); dist is dist(x, E).
    """

    kind: str
    index: int
    level: int
    dist: float


class GapSet:
    """Compact set [outer_lo, outer_hi] minus ordered disjoint open gaps.

    Immutable after construction.  `bands` is an (n, 2) array of closed
    intervals sorted left to right; `gaps` the (n-1, 2) array of the bounded
    complementary intervals.  `gap_levels` maps each gap to its construction
    level (0 for explicitly given bands).
    """

    def __init__(self, bands, provenance=None, gap_levels=None):
        bands = np.array(bands, dtype=float)
        if bands.ndim != 2 or bands.shape[1] != 2 or bands.shape[0] == 0:
            raise ValidationError("bands must be a nonempty list of [lo, hi] pairs")
        if not np.all(np.isfinite(bands)):
            raise ValidationError("band endpoints must be finite")
        order = np.argsort(bands[:, 0])
        bands = bands[order]
        if np.any(bands[:, 1] <= bands[:, 0]):
            raise ValidationError("every band must have positive length")
        if np.any(bands[1:, 0] <= bands[:-1, 1]):
            raise ValidationError("bands must be pairwise disjoint and non-touching")
        self._bands = bands
        self._bands.setflags(write=False)
        self._gaps = np.column_stack([bands[:-1, 1], bands[1:, 0]])
        self._gaps.setflags(write=False)
        self.provenance = provenance or {"kind": "finite"}
        if gap_levels is None:
            gap_levels = np.zeros(len(self._gaps), dtype=int)
        self._gap_levels = np.asarray(gap_levels, dtype=int)
        if len(self._gap_levels) != len(self._gaps):
            raise ValidationError("gap_levels length must match the gap count")
        self._gap_levels.setflags(write=False)

    # -- basic queries ----------------------------------------------------

    @property
    def bands(self):
        return self._bands

    @property
    def gaps(self):
        return self._gaps

    @property
    def gap_levels(self):
        return self._gap_levels

    @property
    def outer_lo(self):
        return float(self._bands[0, 0])

    @property
    def outer_hi(self):
        return float(self._bands[-1, 1])

    @property
    def diameter(self):
        return self.outer_hi - self.outer_lo

    @property
    def n_bands(self):
        return len(self._bands)

    @property
    def n_gaps(self):
        return len(self._gaps)

    def lebesgue_measure(self):
        return float(math.fsum(self._bands[:, 1] - self._bands[:, 0]))

    def gaps_at_level(self, k):
        """Indices of gaps created at construction level k (1-based)."""
        return np.nonzero(self._gap_levels == k)[0]

    @property
    def epsilons(self):
        return tuple(self.provenance.get("epsilons", ()))

    # -- point location ---------------------------------------------------

    def locate(self, x):
        x = float(x)
        if not math.isfinite(x):
            raise ValidationError("locate requires a finite point")
        if x < self.outer_lo:
            return Location("outside-left", -1, 0, self.outer_lo - x)
        if x > self.outer_hi:
            return Location("outside-right", -1, 0, x - self.outer_hi)
        i = int(np.searchsorted(self._bands[:, 1], x))
        if i < self.n_bands and x >= self._bands[i, 0]:
            return Location("band", i, 0, 0.0)
        # strictly between band i-1 and band i
        j = i - 1
        d = min(x - self._bands[j, 1], self._bands[i, 0] - x)
        return Location("gap", j, int(self._gap_levels[j]), d)

    def dist(self, x):
        return self.locate(x).dist

    def dist_many(self, xs):
        """Vectorized dist(x, E) for an array of points."""
        xs = np.asarray(xs, dtype=float)
        edges = self._bands.ravel()
        idx = np.searchsorted(edges, xs)
        inside = idx % 2 == 1  # odd interval index = inside a band
        lo = np.clip(idx - 1, 0, len(edges) - 1)
        hi = np.clip(idx, 0, len(edges) - 1)
        d = np.minimum(np.abs(xs - edges[lo]), np.abs(edges[hi] - xs))
        d[inside] = 0.0
        d[xs <= edges[0]] = np.abs(xs - edges[0])[xs <= edges[0]]
        d[xs >= edges[-1]] = np.abs(xs - edges[-1])[xs >= edges[-1]]
        d[np.isin(xs, edges)] = 0.0
        return d

    def contains(self, x):
        return self.locate(x).kind == "band"

    # -- serialization ----------------------------------------------------

    def to_descriptor(self):
        kind = self.provenance.get("kind", "finite")
        if kind == "finite":
            return {"kind": "finite", "bands": [[float(a), float(b)] for a, b in self._bands]}
        return {
            "kind": kind,
            "outer": [float(self.provenance["outer"][0]), float(self.provenance["outer"][1])],
            "epsilons": [float(e) for e in self.provenance["epsilons"]],
        }

    @staticmethod
    def from_descriptor(desc):
        kind = desc.get("kind")
        if kind == "finite":
            return finite_gap_set(desc["bands"])
        if kind == "infinite_band":
            return infinite_band_set(desc["epsilons"], desc["outer"])
        if kind == "cantor":
            return cantor_set(desc["epsilons"], desc["outer"])
        raise ValidationError(f"unknown set descriptor kind: {kind!r}")

    def __repr__(self):
        return (f"GapSet(outer=[{self.outer_lo:g}, {self.outer_hi:g}], "
                f"bands={self.n_bands}, kind={self.provenance.get('kind')})")

    def __eq__(self, other):
        if not isinstance(other, GapSet):
            return NotImplemented
        return (self._bands.shape == other._bands.shape
                and np.array_equal(self._bands, other._bands))


# -- constructors ----------------------------------------------------------

def finite_gap_set(bands):
    """GapSet from an explicit list of disjoint closed intervals."""
    return GapSet(bands, provenance={"kind": "finite"})


def _check_epsilons(epsilons):
    eps = [float(e) for e in epsilons]
    for e in eps:
        if not (0.0 < e < 1.0):
            raise ValidationError(f"epsilon values must lie in (0, 1); got {e}")
    return eps


def _check_outer(outer):
    lo, hi = float(outer[0]), float(outer[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValidationError("outer interval must be finite with lo < hi")
    return lo, hi


def infinite_band_set(epsilons, outer):
    """Truncated infinite-band set: level k removes the middle eps_k portion
    of the leftmost band.  K levels give K+1 bands and K gaps accumulating
    toward the left endpoint."""
    eps = _check_epsilons(epsilons)
    lo, hi = _check_outer(outer)
    b = hi - lo
    blen = []  # b_k = (1 - eps_k) b_{k-1} / 2, via running product
    glen = []  # g_k = eps_k b_{k-1}
    for e in eps:
        glen.append(e * b)
        b = (1.0 - e) * b / 2.0
        blen.append(b)
    K = len(eps)
    bands = [[lo, lo + blen[K - 1]]] if K else [[lo, hi]]
    levels = []
    for k in range(K, 0, -1):
        prev = (hi - lo) if k == 1 else blen[k - 2]
        bands.append([lo + blen[k - 1] + glen[k - 1], lo + prev])
        levels.append(k)
    return GapSet(
        bands,
        provenance={"kind": "infinite_band", "outer": (lo, hi), "epsilons": tuple(eps)},
        gap_levels=levels,
    )


def cantor_set(epsilons, outer, band_cap=DEFAULT_BAND_CAP):
    """Truncated middle-epsilon Cantor set: level k removes the middle eps_k
    portion from each of the 2^(k-1) bands, giving 2^K bands after K levels."""
    eps = _check_epsilons(epsilons)
    lo, hi = _check_outer(outer)
    K = len(eps)
    if K > 60 or 2 ** K > band_cap:
        raise ResourceError(f"cantor set with K={K} exceeds the band cap {band_cap}")
    lows = np.array([lo])
    highs = np.array([hi])
    b = hi - lo
    for e in eps:
        b = (1.0 - e) * b / 2.0  # exact band length at this level (product form)
        new_lows = np.column_stack([lows, highs - b]).ravel()
        new_highs = np.column_stack([lows + b, highs]).ravel()
        lows, highs = new_lows, new_highs
    bands = np.column_stack([lows, highs])
    return GapSet(
        bands,
        provenance={"kind": "cantor", "outer": (lo, hi), "epsilons": tuple(eps)},
        gap_levels=_cantor_gap_levels(eps) if K else [],
    )


def _cantor_gap_levels(eps):
    """Left-to-right gap levels of the K-level Cantor construction.

    The pattern for K levels is the binary ruler sequence: gap i (1-based,
    i = 1..2^K - 1) has level K + 1 - v where 2^v is the largest power of two
    dividing i... inverted: the middle gap is level 1, etc."""
    K = len(eps)
    n = (1 << K) - 1
    out = np.empty(n, dtype=int)
    for i in range(1, n + 1):
        v = (i & -i).bit_length() - 1  # trailing zeros
        out[i - 1] = K - v
    return out


# -- diagnostics -----------------------------------------------------------

def set_diagnostics(E, delta_grid):
    """Lebesgue measure and an empirical Carleson homogeneity margin.

    The margin is min over sample points x in E (band endpoints and
    midpoints) and deltas in delta_grid of |(x-d, x+d) ∩ E| / d.
    """
    deltas = [float(d) for d in delta_grid]
    if not deltas:
        raise ValidationError("delta_grid must be nonempty")
    bands = E.bands
    xs = np.concatenate([bands[:, 0], bands[:, 1], bands.mean(axis=1)])
    margin = math.inf
    for d in deltas:
        if not (0.0 < d < E.diameter):
            raise ValidationError("delta values must lie in (0, diam(E))")
        lo = np.maximum(bands[None, :, 0], (xs - d)[:, None])
        hi = np.minimum(bands[None, :, 1], (xs + d)[:, None])
        inter = np.clip(hi - lo, 0.0, None).sum(axis=1)
        margin = min(margin, float(inter.min() / d))
    return {"lebesgue_measure": E.lebesgue_measure(), "homogeneity_margin": margin}
