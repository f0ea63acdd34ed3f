"""Reflectionless probability measures on a gap set.

A measure is parametrized by one point gamma_j in each closed gap.  Its
Herglotz transform is the product

    m(z) = -1/sqrt((z-lo)(z-hi)) * prod_j (z-gamma_j)/sqrt((z-a_j)(z-b_j)),

with every square root the principal branch of the boundary value from the
upper half-plane.  All products are evaluated as sums of complex logs so
sets with hundreds of gaps neither overflow nor underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError, ValidationError
from .gapset import GapSet
from .quadrature import cos_quad


class ReflectionlessMeasure:
    """Absolutely continuous reflectionless probability measure on a GapSet."""

    def __init__(self, E, gamma):
        if not isinstance(E, GapSet):
            raise ValidationError("E must be a GapSet")
        gamma = np.asarray(gamma, dtype=float)
        if gamma.shape != (E.n_gaps,):
            raise ValidationError(
                f"need one gamma per gap ({E.n_gaps}), got shape {gamma.shape}")
        gaps = E.gaps
        if E.n_gaps and (np.any(gamma < gaps[:, 0]) or np.any(gamma > gaps[:, 1])):
            raise ValidationError("every gamma_j must lie in its closed gap")
        self.set = E
        self.gamma = gamma
        self.gamma.setflags(write=False)

    @staticmethod
    def from_rule(E, rule="midpoint"):
        """Measure with gamma chosen uniformly: 'alpha' (left gap edges),
        'beta' (right edges), 'midpoint', or an explicit list."""
        if isinstance(rule, str):
            gaps = E.gaps
            if rule == "alpha":
                g = gaps[:, 0]
            elif rule == "beta":
                g = gaps[:, 1]
            elif rule == "midpoint":
                g = gaps.mean(axis=1) if E.n_gaps else np.empty(0)
            else:
                raise ValidationError(f"unknown gamma rule {rule!r}")
            return ReflectionlessMeasure(E, g)
        return ReflectionlessMeasure(E, rule)

    def __repr__(self):
        return f"ReflectionlessMeasure({self.set!r}, n_gaps={self.set.n_gaps})"

    # internal vectorized density kernel (no domain checks)
    def _w(self, t):
        """|m(t+i0)| for an array of real points; 0 where t hits a gamma."""
        t = np.asarray(t, dtype=float)
        E = self.set
        with np.errstate(divide="ignore"):
            s = -0.5 * (np.log(np.abs(t - E.outer_lo)) + np.log(np.abs(t - E.outer_hi)))
            if E.n_gaps:
                tt = t[..., None]
                s = s + np.sum(
                    np.log(np.abs(tt - self.gamma))
                    - 0.5 * np.log(np.abs(tt - E.gaps[:, 0]))
                    - 0.5 * np.log(np.abs(tt - E.gaps[:, 1])),
                    axis=-1,
                )
        return np.exp(s)

    def _w_excluding(self, edge, t):
        """w(t) * sqrt|t - edge| for a band endpoint `edge`: the density
        product with its singular factor at `edge` removed.  Lets callers
        integrate across the edge without catastrophic cancellation."""
        t = np.asarray(t, dtype=float)
        E = self.set
        with np.errstate(divide="ignore"):
            s = np.zeros_like(t)
            if edge != E.outer_lo:
                s -= 0.5 * np.log(np.abs(t - E.outer_lo))
            if edge != E.outer_hi:
                s -= 0.5 * np.log(np.abs(t - E.outer_hi))
            if E.n_gaps:
                tt = t[..., None]
                keep_lo = E.gaps[:, 0] != edge
                keep_hi = E.gaps[:, 1] != edge
                s = s + np.sum(
                    np.log(np.abs(tt - self.gamma))
                    - 0.5 * np.where(keep_lo, np.log(np.abs(tt - E.gaps[:, 0])), 0.0)
                    - 0.5 * np.where(keep_hi, np.log(np.abs(tt - E.gaps[:, 1])), 0.0),
                    axis=-1,
                )
        return np.exp(s)


def _m_upper(mu, z):
    """m(z) for z with Im z >= 0 (boundary values from above)."""
    E = mu.set
    with np.errstate(divide="ignore"):
        total = -0.5 * (np.log(z - E.outer_lo) + np.log(z - E.outer_hi))
        if E.n_gaps:
            total = total + np.sum(
                np.log(z - mu.gamma)
                - 0.5 * np.log(z - E.gaps[:, 0])
                - 0.5 * np.log(z - E.gaps[:, 1])
            )
    if np.isneginf(total.real):
        return complex(0.0)
    return -complex(np.exp(total))


def m_value(mu, z):
    """Herglotz transform of the measure at z.

    Accepts complex z off the real axis, or real z outside the set (where
    the boundary value m(x+i0) is real and is returned with zero imaginary
    part).  Real z inside a band raises DomainError; use density there.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValidationError("m_value requires finite z")
    if z.imag > 0:
        return _m_upper(mu, z)
    if z.imag < 0:
        return np.conj(_m_upper(mu, np.conj(z)))
    if mu.set.locate(z.real).kind == "band":
        raise DomainError("z lies inside a band; the measure has a density there")
    m = _m_upper(mu, complex(z.real, 0.0))
    return complex(m.real, 0.0)


def density(mu, t):
    """Density w(t)/pi of the measure at a point strictly inside a band."""
    t = float(t)
    loc = mu.set.locate(t)
    if loc.kind != "band":
        raise DomainError(f"t={t} is not in the set")
    band = mu.set.bands[loc.index]
    if t == band[0] or t == band[1]:
        raise SingularityError(f"t={t} is a band endpoint")
    return float(mu._w(t)) / math.pi


def total_mass(mu, rtol=1e-10):
    """Integral of the density over all bands; should be 1."""
    parts = [
        cos_quad(lambda t: mu._w(t) / math.pi, lo, hi, rtol=rtol)
        for lo, hi in mu.set.bands
    ]
    return float(math.fsum(parts))


def cauchy_abs_integral(mu, x, rtol=1e-9):
    """Integral of d(rho)(t)/|t-x| over the set, for x off the set."""
    x = float(x)
    if mu.set.locate(x).kind == "band":
        raise DomainError(f"x={x} lies in the set")
    parts = [
        cos_quad(lambda t: mu._w(t) / (math.pi * np.abs(t - x)), lo, hi, rtol=rtol)
        for lo, hi in mu.set.bands
    ]
    return float(math.fsum(parts))


@dataclass(frozen=True)
class ExtremalConfiguration:
    """Per-gap edge choice at maximal distance from a reference point x.

    gamma_tilde[j] is whichever closed-gap endpoint is farther from x
    (ties resolved to the right endpoint)."""

    set: GapSet
    x: float
    gamma_tilde: np.ndarray

    @staticmethod
    def at(E, x):
        x = float(x)
        if E.locate(x).kind == "band":
            raise DomainError(f"x={x} lies in the set")
        gaps = E.gaps
        take_left = np.abs(x - gaps[:, 0]) > np.abs(x - gaps[:, 1])
        gt = np.where(take_left, gaps[:, 0], gaps[:, 1])
        gt.setflags(write=False)
        return ExtremalConfiguration(E, x, gt)


def sup_torus_bound(E, x):
    """Largest possible |m(x)| over all reflectionless measures on the set.

    Attained by the edge configuration farthest from x; this is the
    envelope that the per-gap constants multiply in the estimates."""
    conf = ExtremalConfiguration.at(E, x)
    mu = ReflectionlessMeasure(E, conf.gamma_tilde)
    return float(mu._w(conf.x))


def gap_log_constant(E, gap_index):
    """The constant 9 + 2*min(log ratios) attached to an inner gap."""
    a_k, b_k = E.gaps[gap_index]
    width = b_k - a_k
    return 9.0 + 2.0 * min(
        math.log((b_k - E.outer_lo) / width),
        math.log((E.outer_hi - a_k) / width),
    )


def refl_estimate_check(mu, x, rtol=1e-9):
    """Check the inner-gap estimate: the absolute Cauchy integral of the
    measure at x is at most C_k times the extremal envelope.

    Returns {'lhs', 'rhs', 'Ck', 'ratio'}; the contract is ratio <= 1 up to
    quadrature tolerance."""
    x = float(x)
    loc = mu.set.locate(x)
    if loc.kind != "gap":
        raise DomainError(f"x={x} must lie strictly inside an inner gap")
    Ck = gap_log_constant(mu.set, loc.index)
    lhs = cauchy_abs_integral(mu, x, rtol=rtol)
    rhs = Ck * sup_torus_bound(mu.set, x)
    return {"lhs": lhs, "rhs": rhs, "Ck": Ck, "ratio": lhs / rhs}
