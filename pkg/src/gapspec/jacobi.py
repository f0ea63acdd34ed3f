"""Jacobi matrices: coefficients from measures, tridiagonal spectra,
local spectral measures, sandwiched-resolvent trace norms, perturbation
splitting, and gap-eigenvalue extraction.

Two independent eigensolvers are kept on purpose: Sturm-sequence bisection
for tridiagonal sections and cyclic Jacobi rotations for dense symmetric
matrices; they cross-check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numba import njit, prange

from .errors import AccuracyError, SingularityError, ValidationError
from .reflmeasure import m_value


@dataclass(frozen=True)
class JacobiCoeffs:
    """Half-line or windowed Jacobi coefficients: off-diagonal a > 0 and
    diagonal b, with len(a) = len(b) - 1 for a finite section."""

    a: np.ndarray
    b: np.ndarray
    index_origin: int = 1

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if len(a) != len(b) - 1:
            raise ValidationError("need len(a) == len(b) - 1")
        if np.any(a <= 0):
            raise ValidationError("off-diagonal entries must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self):
        return len(self.b)

    def section(self, N):
        if N > self.n:
            raise ValidationError(f"section size {N} exceeds {self.n} coefficients")
        return JacobiCoeffs(self.a[:N - 1], self.b[:N], self.index_origin)

    def dense(self):
        T = np.diag(self.b)
        idx = np.arange(self.n - 1)
        T[idx, idx + 1] = self.a
        T[idx + 1, idx] = self.a
        return T


# -- Sturm-sequence bisection ----------------------------------------------

@njit(cache=True, parallel=True)
def _sturm_counts(a2, b, xs, pivmin):
    """Number of eigenvalues strictly below each x, by counting negative
    pivots of the shifted LDL^T recursion."""
    n = len(b)
    out = np.empty(len(xs), dtype=np.int64)
    for j in prange(len(xs)):
        x = xs[j]
        cnt = 0
        q = b[0] - x
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            cnt += 1
        for i in range(1, n):
            q = b[i] - x - a2[i - 1] / q
            if abs(q) < pivmin:
                q = -pivmin
            if q < 0.0:
                cnt += 1
        out[j] = cnt
    return out


def _gershgorin(a, b):
    n = len(b)
    r = np.zeros(n)
    if n > 1:
        r[:-1] += np.abs(a)
        r[1:] += np.abs(a)
    return float(np.min(b - r)), float(np.max(b + r))


@njit(cache=True, parallel=True)
def _bisect_kernel(a2, b, indices, lo0, hi0, atol, pivmin):
    n = len(b)
    out = np.empty(len(indices))
    for j in prange(len(indices)):
        target = indices[j] + 1
        lo = lo0
        hi = hi0
        for _ in range(200):
            if hi - lo <= atol:
                break
            mid = 0.5 * (lo + hi)
            cnt = 0
            q = b[0] - mid
            if abs(q) < pivmin:
                q = -pivmin
            if q < 0.0:
                cnt += 1
            for i in range(1, n):
                q = b[i] - mid - a2[i - 1] / q
                if abs(q) < pivmin:
                    q = -pivmin
                if q < 0.0:
                    cnt += 1
            if cnt >= target:
                hi = mid
            else:
                lo = mid
        out[j] = 0.5 * (lo + hi)
    return out


def _bisect_indices(a, b, indices, lo0, hi0, atol):
    """Bisection for the eigenvalues with the given ascending 0-based
    indices, all known to lie in [lo0, hi0]."""
    a2 = np.ascontiguousarray(a * a)
    bb = np.ascontiguousarray(b)
    scale = max(abs(lo0), abs(hi0), 1e-300)
    idx = np.asarray(indices, dtype=np.int64)
    return _bisect_kernel(a2, bb, idx, lo0, hi0, atol, scale * 1e-290)


def eig_tridiag(J, atol=None):
    """All eigenvalues of a finite tridiagonal section, ascending, via
    Sturm-sequence bisection."""
    a, b = (J.a, J.b) if isinstance(J, JacobiCoeffs) else J
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(b)
    lo, hi = _gershgorin(a, b)
    scale = max(abs(lo), abs(hi), 1.0)
    if atol is None:
        atol = 1e-14 * scale
    if n == 1:
        return b.copy()
    return _bisect_indices(a, b, np.arange(n), lo - scale * 1e-12, hi + scale * 1e-12, atol)


def eigs_in_interval(J, lo, hi, atol=None):
    """Eigenvalues of a tridiagonal section inside (lo, hi), ascending."""
    a, b = (J.a, J.b) if isinstance(J, JacobiCoeffs) else J
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a2 = np.ascontiguousarray(a * a)
    gl, gu = _gershgorin(a, b)
    scale = max(abs(gl), abs(gu), 1.0)
    if atol is None:
        atol = 1e-14 * scale
    pivmin = scale * 1e-290
    c_lo, c_hi = _sturm_counts(a2, b, np.array([lo, hi]), pivmin)
    if c_hi == c_lo:
        return np.empty(0)
    return _bisect_indices(a, b, np.arange(c_lo, c_hi), lo, hi, atol)


# -- cyclic Jacobi rotations -------------------------------------------------

@njit(cache=True)
def _cyclic_jacobi(A, tol, max_sweeps):
    n = A.shape[0]
    V = np.eye(n)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * A[p, q] * A[p, q]
        if math.sqrt(off) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = 0.5 * (A[q, q] - A[p, p]) / apq
                t = 1.0 / (abs(theta) + math.sqrt(1.0 + theta * theta))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    akp = A[p, k]
                    akq = A[q, k]
                    A[p, k] = c * akp - s * akq
                    A[q, k] = s * akp + c * akq
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
    return np.diag(A).copy(), V


def jacobi_eigh(A, tol_factor=1e-13, max_sweeps=30):
    """Eigenvalues (ascending) and eigenvectors of a dense symmetric
    matrix via cyclic Jacobi rotations."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError("jacobi_eigh needs a square matrix")
    if not np.allclose(A, A.T, atol=1e-12 * (1.0 + np.abs(A).max())):
        raise ValidationError("jacobi_eigh needs a symmetric matrix")
    scale = max(float(np.abs(A).max()), 1e-300)
    w, V = _cyclic_jacobi(A, tol_factor * scale, max_sweeps)
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def local_spectral_measure(J, site):
    """Point masses (lambda_i, w_i) of the spectral measure of a finite
    section at the given site; weights are squared eigenvector entries."""
    if not isinstance(J, JacobiCoeffs):
        J = JacobiCoeffs(*J)
    if not 0 <= site < J.n:
        raise ValidationError("site out of range")
    w, V = jacobi_eigh(J.dense())
    return w, V[site, :] ** 2


def sandwich_trace_norm(J, D, x):
    """Trace norm of D^(1/2) (J - x)^(-1) D^(1/2) for a finite tridiagonal
    section and a nonnegative diagonal D."""
    if not isinstance(J, JacobiCoeffs):
        J = JacobiCoeffs(*J)
    d = np.asarray(D, dtype=float)
    if d.shape != (J.n,):
        raise ValidationError("D must be one diagonal entry per site")
    if np.any(d < 0):
        raise ValidationError("D must be nonnegative")
    lam = eig_tridiag(J)
    scale = max(1.0, float(np.abs(lam).max()))
    if np.min(np.abs(lam - x)) < 1e-12 * scale:
        raise SingularityError(f"x={x} is within 1e-12*scale of an eigenvalue")
    if not np.any(d > 0):
        return 0.0
    T = J.dense() - x * np.eye(J.n)
    R = np.linalg.solve(T, np.eye(J.n))
    sq = np.sqrt(d)
    M = sq[:, None] * R * sq[None, :]
    M = 0.5 * (M + M.T)
    w, _ = jacobi_eigh(M)
    return float(np.sum(np.abs(w)))


# -- perturbations -----------------------------------------------------------

@dataclass(frozen=True)
class PerturbationSplit:
    """Decomposition of a tridiagonal perturbation into a difference of
    nonnegative tridiagonal parts dominated by diagonal matrices."""

    delta_a: np.ndarray
    delta_b: np.ndarray
    plus_a: np.ndarray
    plus_b: np.ndarray
    minus_a: np.ndarray
    minus_b: np.ndarray
    D_plus: np.ndarray
    D_minus: np.ndarray

    def dense_plus(self):
        return _tridense(self.plus_a, self.plus_b)

    def dense_minus(self):
        return _tridense(self.minus_a, self.minus_b)


def _tridense(a, b):
    T = np.diag(b)
    idx = np.arange(len(b) - 1)
    T[idx, idx + 1] = a
    T[idx + 1, idx] = a
    return T


def split_perturbation(delta_a, delta_b):
    """Split delta_J into delta_J_plus - delta_J_minus with diagonal
    dominators D_plus, D_minus.

    The plus/minus parts carry half of each off-diagonal entry plus enough
    diagonal to stay positive semidefinite; the dominators double that
    diagonal allowance."""
    da = np.asarray(delta_a, dtype=float)
    db = np.asarray(delta_b, dtype=float)
    L = max(len(db), len(da) + 1)
    da = np.pad(da, (0, L - 1 - len(da)))
    db = np.pad(db, (0, L - len(db)))
    abs_here = np.abs(da)
    halo = np.zeros(L)
    halo[:-1] += abs_here
    halo[1:] += abs_here
    bp = np.maximum(db, 0.0) + 0.5 * halo
    bm = np.maximum(-db, 0.0) + 0.5 * halo
    Dp = np.maximum(db, 0.0) + halo
    Dm = np.maximum(-db, 0.0) + halo
    return PerturbationSplit(da, db, 0.5 * da, bp, -0.5 * da, bm, Dp, Dm)


def perturbed_section(J, delta_a, delta_b, N, offset=0):
    """N x N section of J with (delta_a, delta_b) added starting at the
    given site offset."""
    if not isinstance(J, JacobiCoeffs):
        J = JacobiCoeffs(*J)
    sec = J.section(N)
    a = sec.a.copy()
    b = sec.b.copy()
    da = np.asarray(delta_a, dtype=float)
    db = np.asarray(delta_b, dtype=float)
    if offset + len(da) > N - 1 or offset + len(db) > N:
        raise ValidationError("perturbation support exceeds the section")
    a[offset:offset + len(da)] += da
    b[offset:offset + len(db)] += db
    if np.any(a <= 0):
        raise ValidationError("perturbed off-diagonal must stay positive")
    return JacobiCoeffs(a, b)


# -- coefficients from a measure ---------------------------------------------

@njit(cache=True, fastmath=True)
def _rkpw(x, w, N):
    """Recurrence coefficients of the discrete measure sum w_j delta_{x_j}
    by orthogonal-rotation updates, one node at a time (numerically stable
    reconstruction of a Jacobi matrix from spectral data)."""
    M = len(x)
    p0 = x.copy()
    p1 = np.zeros(M)
    p1[0] = w[0]
    for n in range(M - 1):
        pn = w[n + 1]
        gam = 1.0
        sig = 0.0
        t = 0.0
        xlam = x[n + 1]
        for k in range(n + 2):
            rho = p1[k] + pn
            tmp = gam * rho
            tsig = sig
            if rho <= 0.0:
                gam = 1.0
                sig = 0.0
            else:
                gam = p1[k] / rho
                sig = pn / rho
            tk = sig * (p0[k] - xlam) - gam * t
            p0[k] -= tk - t
            t = tk
            if sig <= 0.0:
                pn = tsig * p1[k]
            else:
                pn = t * t / sig
            p1[k] = tmp
    return p0[:N], p1[:N]


def _band_nodes(mu, lo, hi, per_band):
    """Chebyshev-type discretization of the measure restricted to one band.

    The uniform-theta midpoint rule under t = c + r*cos(theta) integrates
    trigonometric polynomials of degree < 2M exactly, so the recurrence
    coefficients of the discrete band measure track those of mu | band as
    soon as M comfortably exceeds the requested coefficient count."""
    theta = (np.arange(per_band) + 0.5) * (math.pi / per_band)
    c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
    t = c + r * np.cos(theta)
    w = (r / per_band) * np.sin(theta) * mu._w(t)
    return theta, t[::-1].copy(), w[::-1].copy()


def _band_moments(theta, w, n_moments):
    """Band-interval Chebyshev moments of the discrete rule: since
    T_k(cos theta) = cos(k theta) these are plain cosine sums.  The first
    2N of them determine the first N recurrence coefficients, so moment
    agreement under node doubling certifies the discretization."""
    wr = w[::-1]  # w was reversed to ascending t; undo to match theta
    nu = np.empty(n_moments)
    nu[0] = wr.sum()
    cos_t = np.cos(theta)
    prev = np.ones_like(theta)
    cur = cos_t
    nu[1] = np.dot(wr, cur)
    for k in range(2, n_moments):
        prev, cur = cur, 2.0 * cos_t * cur - prev
        nu[k] = np.dot(wr, cur)
    return nu


@njit(cache=True, parallel=True)
def _gauss_weights(a, b, beta0, xs):
    """Gauss weights beta0 / sum_k q_k(x)^2 from the three-term recurrence
    values q_k at each rule node x (an eigenvalue of the section)."""
    N = len(b)
    out = np.empty(len(xs))
    for i in prange(len(xs)):
        x = xs[i]
        qm = 0.0
        q = 1.0
        s = 1.0
        for k in range(N - 1):
            qn = ((x - b[k]) * q - (a[k - 1] * qm if k > 0 else 0.0)) / a[k]
            qm = q
            q = qn
            s += q * q
            if s > 1e280:
                break
        out[i] = beta0 / s
    return out


def _gauss_rule(alpha, beta, R):
    """R-point Gauss rule of the discrete measure with recurrence
    coefficients (alpha, beta): nodes are section eigenvalues, weights come
    from the orthonormal-polynomial values at each node."""
    a = np.sqrt(beta[1:R])
    b = np.ascontiguousarray(alpha[:R])
    xs = scipy.linalg.eigh_tridiagonal(b, a, eigvals_only=True)
    ws = _gauss_weights(a, b, beta[0], xs)
    return xs, ws


def _leaf_coeffs(mu, lo, hi, N, start, verify, rtol):
    """Recurrence coefficients of mu restricted to one band.  The node
    count doubles until the determining Chebyshev moments agree; only the
    final rule is tridiagonalized."""
    M = max(N + 64, start)
    theta, x, w = _band_nodes(mu, lo, hi, M)
    if not verify:
        return _rkpw(x, w, N)
    nu = _band_moments(theta, w, 2 * N)
    while M <= MAX_LEAF_NODES:
        M *= 2
        theta, x, w = _band_nodes(mu, lo, hi, M)
        nu2 = _band_moments(theta, w, 2 * N)
        err = float(np.max(np.abs(nu - nu2)))
        nu = nu2
        if err <= rtol * max(nu[0], 1e-300):
            return _rkpw(x, w, N)
    raise AccuracyError("band moment discretization did not converge",
                        estimate=err, error_bound=err)


MAX_LEAF_NODES = 1 << 17


def stieltjes_coefficients(mu, N, min_per_band=None, verify=True, rtol=1e-10):
    """First N recurrence coefficients of the orthonormal polynomials of a
    reflectionless measure.  Returns JacobiCoeffs with len(b) = N.

    Each band is discretized and tridiagonalized on its own; the band
    measures are then merged pairwise through N-point Gauss rules, which
    preserves all moments up to degree 2N-1 at every step, so the cost
    stays quadratic in N rather than in the total node count.  With verify
    the per-band node count is doubled until coefficients agree to rtol."""
    if N < 1:
        raise ValidationError("N must be >= 1")
    start = min_per_band if min_per_band is not None else N + 64
    rules = []
    for lo, hi in mu.set.bands:
        alpha, beta = _leaf_coeffs(mu, lo, hi, N, start, verify, rtol)
        rules.append((alpha, beta))
    while len(rules) > 1:
        merged = []
        for i in range(0, len(rules) - 1, 2):
            x1, w1 = _gauss_rule(*rules[i], N)
            x2, w2 = _gauss_rule(*rules[i + 1], N)
            x = np.concatenate([x1, x2])
            w = np.concatenate([w1, w2])
            order = np.argsort(x)
            merged.append(_rkpw(x[order], w[order], N))
        if len(rules) % 2:
            merged.append(rules[-1])
        rules = merged
    alpha, beta = rules[0]
    # beta[0] is the total mass; a_n^2 = beta[n] for n >= 1
    return JacobiCoeffs(np.sqrt(beta[1:]), alpha)


# -- discrete eigenvalues off the essential spectrum --------------------------

def gap_eigenvalues(J, E, N, tol, delta_a=None, delta_b=None):
    """Eigenvalues of the N-section at distance > tol from the set,
    filtered by double-truncation agreement with the 2N-section."""
    if N < 16:
        raise ValidationError("N must be >= 16")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if not isinstance(J, JacobiCoeffs):
        J = JacobiCoeffs(*J)
    da = np.zeros(0) if delta_a is None else np.asarray(delta_a, dtype=float)
    db = np.zeros(0) if delta_b is None else np.asarray(delta_b, dtype=float)
    N2 = min(2 * N, J.n)
    if N2 <= N:
        raise ValidationError("need coefficients beyond N for the artifact filter")
    sec1 = perturbed_section(J, da, db, N)
    sec2 = perturbed_section(J, da, db, N2)
    gl1, gu1 = _gershgorin(sec1.a, sec1.b)
    gl2, gu2 = _gershgorin(sec2.a, sec2.b)
    gl, gu = min(gl1, gl2) - 1.0, max(gu1, gu2) + 1.0
    regions = [(gl, E.outer_lo - tol), (E.outer_hi + tol, gu)]
    for a, b in E.gaps:
        if b - a > 2 * tol:
            regions.append((a + tol, b - tol))
    match = max(1e-8, tol / 100.0)
    a2_2 = np.ascontiguousarray(sec2.a * sec2.a)
    scale = max(abs(gl), abs(gu), 1.0)
    out = []
    for lo, hi in regions:
        if hi <= lo:
            continue
        for lam in eigs_in_interval(sec1, lo, hi):
            c = _sturm_counts(a2_2, sec2.b, np.array([lam - match, lam + match]),
                              scale * 1e-290)
            if c[1] > c[0]:
                out.append(float(lam))
    return sorted(out)


def rank_one_secular(mu, delta_b, E=None):
    """Eigenvalues of a rank-one diagonal perturbation at the site whose
    spectral measure is mu: solutions of m(lambda) = -1/delta_b in each
    gap and outside the set, by bisection on the increasing m."""
    if delta_b == 0:
        raise ValidationError("delta_b must be nonzero")
    E = mu.set if E is None else E
    target = -1.0 / delta_b
    roots = []

    def f(x):
        return m_value(mu, x).real - target

    eps_rel = 1e-13
    for a, b in E.gaps:
        width = b - a
        lo, hi = a + eps_rel * width, b - eps_rel * width
        flo, fhi = f(lo), f(hi)
        if flo > 0 or fhi < 0:
            continue  # m is increasing on the gap; no crossing inside
        roots.append(_bisect_root(f, lo, hi, flo))
    # left of the set: m decreases from 0+ down to... increases toward +inf
    span = max(1.0, E.diameter)
    if target > 0:
        lo = E.outer_lo - span
        while f(lo) > 0 and span < 1e12:
            span *= 2
            lo = E.outer_lo - span
        hi = E.outer_lo - eps_rel * span
        if f(lo) <= 0 <= f(hi):
            roots.append(_bisect_root(f, lo, hi, f(lo)))
    if target < 0:
        span = max(1.0, E.diameter)
        hi = E.outer_hi + span
        while f(hi) < 0 and span < 1e12:
            span *= 2
            hi = E.outer_hi + span
        lo = E.outer_hi + eps_rel * span
        if f(lo) <= 0 <= f(hi):
            roots.append(_bisect_root(f, lo, hi, f(lo)))
    return sorted(roots)


def _bisect_root(f, lo, hi, flo):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if (fm <= 0) == (flo <= 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
