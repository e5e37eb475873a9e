"""Truncated-series simulation of planar and symmetric planar GAFs.

Both are ``f(z) = sum_k a_k pi^{k/2} z^k / sqrt(k!)`` with i.i.d. unit complex
(planar) or unit real (symmetric) Gaussian coefficients. Evaluation always
carries the weight ``exp(-pi |z|^2 / 2)``: the weighted terms are bounded by
``|a_k|`` (they are ``a_k`` times the square root of a Poisson probability),
so nothing overflows and the zeros are unchanged.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import gammaln

from ._random import GAF, stream
from .errors import InvalidArgument, OutOfSafeRegion, ZeroFindingIncomplete
from .ppstats import Disk, PointPattern, Rect

TAIL_TOL = 1e-12
SAFE_MARGIN = 0.5
MAX_RADIUS = 20.0
GRID_SPACING = 0.05
NEWTON_TOL = 1e-12
NEWTON_MAXITER = 50
DEDUP_DIST = 1e-6


@dataclass(frozen=True, eq=False)
class GafSample:
    kind: Literal["planar", "symmetric"]
    coefficients: np.ndarray
    radius: float

    @property
    def order(self):
        return len(self.coefficients) - 1


def tail_log_ratio(order, R):
    """``log( sum_{k > order} (pi R^2)^k / k! ) - pi R^2``."""
    lam = math.pi * R**2
    k = np.arange(order + 1, order + 1 + max(200, int(10 * math.sqrt(lam) + 50)))
    logs = k * math.log(lam) - gammaln(k + 1)
    top = logs.max()
    return top + math.log(np.exp(logs - top).sum()) - lam


def truncation_order(R, tol=TAIL_TOL):
    """Smallest order whose neglected tail variance is below ``tol`` relative."""
    if not R > 0:
        raise InvalidArgument("radius must be positive")
    lam = math.pi * R**2
    log_tol = math.log(tol)
    n = int(lam)
    while tail_log_ratio(n, R) > log_tol:
        n += 1
    # walk back in case the start overshot
    while n > 0 and tail_log_ratio(n - 1, R) <= log_tol:
        n -= 1
    return n


def sample_gaf(kind, R, seed, substream=()):
    """Draw a GAF truncated so that it is accurate on the disk ``|z| <= R``."""
    if kind not in ("planar", "symmetric"):
        raise InvalidArgument(f"unknown GAF kind {kind!r}")
    if not 0 < R <= MAX_RADIUS:
        raise InvalidArgument(f"radius must lie in (0, {MAX_RADIUS}]")
    order = truncation_order(R)
    rng = stream(seed, GAF, *substream)
    if kind == "planar":
        a = (rng.standard_normal(order + 1) + 1j * rng.standard_normal(order + 1)) / math.sqrt(2)
    else:
        a = rng.standard_normal(order + 1)
    return GafSample(kind, a, float(R))


def from_polynomial(coefficients, R=5.0, kind=None):
    """GAF sample whose series equals the polynomial ``sum c_k z^k``.

    The basis coefficient is ``a_k = c_k sqrt(k!) / pi^{k/2}``.
    """
    c = np.asarray(coefficients)
    k = np.arange(len(c))
    a = c * np.exp(0.5 * gammaln(k + 1) - 0.5 * k * math.log(math.pi))
    if kind is None:
        kind = "planar" if np.iscomplexobj(c) else "symmetric"
    return GafSample(kind, a, float(R))


def _check_safe(gaf, z):
    if np.any(np.abs(z) > gaf.radius * (1 + 1e-12)):
        raise OutOfSafeRegion(f"|z| exceeds the safe radius {gaf.radius}")


def _weighted_terms_sum(gaf, z, derivative=False):
    # t_k = exp(-pi|z|^2/2) (sqrt(pi) z)^k / sqrt(k!), |t_k| <= 1
    z = np.asarray(z, dtype=complex)
    w = math.sqrt(math.pi) * z
    t = np.exp(-0.5 * math.pi * np.abs(z) ** 2).astype(complex)
    a = gaf.coefficients
    f = a[0] * t
    fp = np.zeros_like(f) if derivative else None
    for k in range(1, len(a)):
        if derivative:
            # d/dz of the unweighted term k is sqrt(pi k) times term k-1
            fp = fp + a[k] * math.sqrt(math.pi * k) * t
        t = t * w / math.sqrt(k)
        f = f + a[k] * t
    return (f, fp) if derivative else f


def eval_scaled(gaf: GafSample, z):
    """``exp(-pi |z|^2 / 2) f(z)`` for ``|z| <= R``."""
    z = np.asarray(z, dtype=complex)
    _check_safe(gaf, z)
    val = _weighted_terms_sum(gaf, z)
    return val if val.ndim else complex(val)


def eval_scaled_with_derivative(gaf: GafSample, z):
    """Weighted value and weighted derivative ``exp(-pi|z|^2/2) f'(z)``."""
    z = np.asarray(z, dtype=complex)
    _check_safe(gaf, z)
    return _weighted_terms_sum(gaf, z, derivative=True)


def _newton(gaf, z0):
    z = np.array(z0, dtype=complex)
    active = np.ones(z.shape, dtype=bool)
    converged = np.zeros(z.shape, dtype=bool)
    for _ in range(NEWTON_MAXITER):
        if not active.any():
            break
        zi = z[active]
        inside = np.abs(zi) <= gaf.radius
        f, fp = _weighted_terms_sum(gaf, np.where(inside, zi, 0), derivative=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(inside, f / fp, np.nan)
        zi = zi - step
        idx = np.flatnonzero(active)
        z[idx] = zi
        bad = ~np.isfinite(step)
        done = np.abs(step) < NEWTON_TOL
        converged[idx[done]] = True
        active[idx[done | bad]] = False
    converged &= np.isfinite(z)
    return z[converged]


def _dedupe(z):
    kept = []
    for zi in z[np.lexsort((z.imag, z.real))]:
        if not any(abs(zi - zk) < DEDUP_DIST for zk in kept[-20:]):
            kept.append(zi)
    return np.array(kept, dtype=complex)


def _boundary(region, t):
    # t in [0, 1] parametrises the positively oriented boundary
    if isinstance(region, Disk):
        return complex(region.cu, region.cv) + region.radius * np.exp(2j * np.pi * t)
    u0, u1, v0, v1 = region.bbox
    corners = np.array([u0 + 1j * v0, u1 + 1j * v0, u1 + 1j * v1, u0 + 1j * v1, u0 + 1j * v0])
    s = 4 * np.asarray(t, dtype=float)
    i = np.minimum(s.astype(int), 3)
    frac = s - i
    return corners[i] + frac * (corners[i + 1] - corners[i])


def winding_number(gaf: GafSample, region, max_step=np.pi / 8, initial=512, max_depth=30):
    """Zero count inside ``region`` by the argument principle.

    The phase of ``f`` is tracked along the boundary; any segment whose phase
    increment exceeds ``max_step`` is bisected until it does not. All open
    segments of one bisection level are evaluated together.
    """
    t = np.linspace(0.0, 1.0, initial + 1)
    phase = np.angle(eval_scaled(gaf, _boundary(region, t)))
    ta, tb, pa, pb = t[:-1], t[1:], phase[:-1], phase[1:]
    total = 0.0
    for depth in range(max_depth + 1):
        d = (pb - pa + np.pi) % (2 * np.pi) - np.pi
        split = np.abs(d) > max_step
        if depth == max_depth:
            split[:] = False
        total += d[~split].sum()
        if not split.any():
            break
        ta, tb, pa, pb = ta[split], tb[split], pa[split], pb[split]
        tm = 0.5 * (ta + tb)
        pm = np.angle(eval_scaled(gaf, _boundary(region, tm)))
        ta, tb = np.concatenate([ta, tm]), np.concatenate([tm, tb])
        pa, pb = np.concatenate([pa, pm]), np.concatenate([pm, pb])
    return int(round(total / (2 * np.pi)))


def _region_check(gaf, region):
    u0, u1, v0, v1 = region.bbox
    if isinstance(region, Disk):
        reach = abs(complex(region.cu, region.cv)) + region.radius
    else:
        reach = max(abs(complex(u, v)) for u in (u0, u1) for v in (v0, v1))
    if reach > gaf.radius - SAFE_MARGIN + 1e-12:
        raise OutOfSafeRegion(
            f"region reaches |z|={reach:.4g}; zeros are only reported up to "
            f"R - {SAFE_MARGIN} = {gaf.radius - SAFE_MARGIN:.4g}")


def _scan(gaf, region, spacing):
    u0, u1, v0, v1 = region.bbox
    pad = 2 * spacing
    us = np.arange(u0 - pad, u1 + pad + spacing / 2, spacing)
    vs = np.arange(v0 - pad, v1 + pad + spacing / 2, spacing)
    Z = us[:, None] + 1j * vs[None, :]
    Z = np.where(np.abs(Z) <= gaf.radius, Z, np.nan)
    with np.errstate(invalid="ignore"):
        A = np.abs(_weighted_terms_sum(gaf, np.nan_to_num(Z)))
    A = np.where(np.isnan(Z), np.inf, A)
    c = A[1:-1, 1:-1]
    m = np.isfinite(c)
    for di in (-1, 0, 1):
        for dk in (-1, 0, 1):
            if di or dk:
                m &= c <= A[1 + di : A.shape[0] - 1 + di, 1 + dk : A.shape[1] - 1 + dk]
    return Z[1:-1, 1:-1][m]


def find_zeros(gaf: GafSample, region, spacing=GRID_SPACING, refinements=3):
    """Zeros inside ``region`` (a :class:`Disk` or :class:`Rect`).

    Candidates are grid local minima of ``|f|`` at the given spacing, polished
    by Newton's method and deduplicated. The count inside the region must
    equal the argument-principle winding number; if it does not, the scan is
    repeated at half the spacing up to ``refinements`` times before
    :class:`ZeroFindingIncomplete` is raised.
    """
    _region_check(gaf, region)
    expected = winding_number(gaf, region)
    h = spacing
    for _ in range(refinements + 1):
        z = _dedupe(_newton(gaf, _scan(gaf, region, h)))
        pts = np.column_stack([z.real, z.imag]) if len(z) else np.zeros((0, 2))
        inside = region.contains(pts, tol=0.0) if len(z) else np.zeros(0, bool)
        if inside.sum() == expected:
            return PointPattern(pts[inside], region)
        h /= 2
    raise ZeroFindingIncomplete(int(inside.sum()), expected, region)


def real_zeros(gaf: GafSample, x0, x1, spacing=0.01, tol=1e-12):
    """Real zeros of a symmetric GAF in ``[x0, x1]``: sign changes, then bisection."""
    if gaf.kind != "symmetric":
        raise InvalidArgument("real zeros are only defined for the symmetric GAF")
    if x1 <= x0:
        return np.zeros(0)
    if max(abs(x0), abs(x1)) > gaf.radius:
        raise OutOfSafeRegion(f"interval leaves the safe radius {gaf.radius}")

    def f(x):
        return _weighted_terms_sum(gaf, np.asarray(x, dtype=float) + 0j).real

    m = max(2, int(math.ceil((x1 - x0) / spacing)) + 1)
    xs = np.linspace(x0, x1, m)
    fx = f(xs)
    roots = list(xs[fx == 0])
    lo_idx = np.flatnonzero(fx[:-1] * fx[1:] < 0)
    lo, hi = xs[lo_idx].copy(), xs[lo_idx + 1].copy()
    flo = fx[lo_idx].copy()
    while len(lo) and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= tol):
            break
    roots.extend(0.5 * (lo + hi))
    return np.sort(np.array(roots, dtype=float))
