"""Gauss-Legendre quadrature in cosine-substituted variables.

Integrands on a band [lo, hi] carry inverse-square-root singularities at
both endpoints.  Substituting t = c + r*cos(theta) turns them into smooth
integrands in theta, so composite Gauss-Legendre with panel doubling
converges fast; the panel count doubles until two refinements agree.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, ValidationError

MAX_NODES = 1 << 20
PANEL_ORDER = 24


@lru_cache(maxsize=16)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _composite(a, b, panels, order=PANEL_ORDER):
    """Composite Gauss-Legendre nodes/weights on [a, b] with equal panels."""
    x, w = _leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    nodes = (mid[:, None] + half * x[None, :]).ravel()
    weights = np.tile(half * w, panels)
    return nodes, weights


def cos_nodes(lo, hi, n_panels, order=PANEL_ORDER):
    """Nodes and dt-weights for integrating f(t) dt over a band [lo, hi]
    where f may blow up like 1/sqrt at the endpoints.

    Returns (t, w) with sum(w * f(t)) ~ integral; the weights absorb the
    Jacobian r*sin(theta) of t = c + r*cos(theta).
    """
    theta, wt = _composite(0.0, math.pi, n_panels, order)
    c = 0.5 * (lo + hi)
    r = 0.5 * (hi - lo)
    t = c + r * np.cos(theta)
    w = wt * r * np.sin(theta)
    return t, w


def _adapt(make_nodes, f, rtol, atol, max_nodes, order):
    panels = 1
    t, w = make_nodes(panels)
    prev = float(np.dot(w, f(t)))
    cur = prev
    while panels * order <= max_nodes:
        panels *= 2
        t, w = make_nodes(panels)
        cur = float(np.dot(w, f(t)))
        if abs(cur - prev) <= rtol * abs(cur) + atol:
            return cur
        prev = cur
    raise AccuracyError(
        "quadrature did not converge",
        estimate=cur,
        error_bound=abs(cur - prev),
    )


def cos_quad(f, lo, hi, rtol=1e-9, atol=0.0, max_nodes=MAX_NODES, order=PANEL_ORDER):
    """Adaptively integrate f(t) dt over a band [lo, hi], absorbing inverse
    square-root endpoint singularities.  f must accept numpy arrays."""
    if not hi > lo:
        raise ValidationError("cos_quad needs hi > lo")
    return _adapt(lambda p: cos_nodes(lo, hi, p, order), f, rtol, atol, max_nodes, order)


def sqrt_edge_nodes(edge, x, n_panels, order=PANEL_ORDER):
    """Nodes and weights for integrating f(s) ds from a band edge to x when
    f has a 1/sqrt singularity at the edge only.

    Substitutes s = edge + sgn*tau^2; weights honor the orientation
    edge -> x (negative when x < edge).
    """
    span = x - edge
    sgn = 1.0 if span >= 0 else -1.0
    tau, wt = _composite(0.0, math.sqrt(abs(span)), n_panels, order)
    s = edge + sgn * tau * tau
    w = sgn * wt * 2.0 * tau
    return s, w


def sqrt_edge_quad(f, edge, x, rtol=1e-10, atol=0.0, max_nodes=MAX_NODES, order=PANEL_ORDER):
    """Adaptive line integral from a band edge to x (singular at the edge)."""
    if x == edge:
        return 0.0
    return _adapt(lambda p: sqrt_edge_nodes(edge, x, p, order), f, rtol, atol, max_nodes, order)


def reduced_edge_quad(f_reduced, edge, x, rtol=1e-10, atol=0.0,
                      max_nodes=MAX_NODES, order=PANEL_ORDER):
    """Integrate f(s) ds from edge to x where f(s) blows up like
    1/sqrt|s-edge| and the caller supplies the bounded remainder
    f_reduced(s, offset) = f(s) * sqrt|s-edge| with the exact offset
    s-edge passed separately (so the singular factor never suffers
    cancellation near the edge)."""
    span = x - edge
    if span == 0:
        return 0.0
    sgn = 1.0 if span > 0 else -1.0

    def make(panels):
        tau, wt = _composite(0.0, math.sqrt(abs(span)), panels, order)
        return tau, 2.0 * sgn * wt

    def g(tau):
        off = sgn * tau * tau
        return f_reduced(edge + off, off)

    return _adapt(make, g, rtol, atol, max_nodes, order)
