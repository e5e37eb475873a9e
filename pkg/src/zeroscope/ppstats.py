"""Point patterns and their functional summary statistics.

All estimators use minus-sampling ("border") edge correction except the pair
correlation function, which uses the translation correction. For a pattern
``x_1..x_n`` in a window ``W`` with ``b_i`` the distance from ``x_i`` to the
boundary of ``W`` and ``I(r) = {i : b_i > r}``:

* ``K(r) = |W| / ((n-1) |I(r)|) * sum_{i in I(r)} #{j != i : |x_i - x_j| <= r}``
  (the ordered-pair count over interior points, normalised by ``lambda = n/|W|``
  and by the ``(n-1)/n`` unbiasing factor);
* ``L(r) = sqrt(K(r) / pi)``;
* ``G(r) = #{i in I(r) : d_i <= r} / |I(r)|`` with ``d_i`` the nearest
  neighbour distance of ``x_i`` in the full pattern;
* ``F(r)``: same as ``G`` but over a regular grid of reference locations
  instead of the pattern points;
* ``g(r) = |W|^2 / (n (n-1)) / (2 pi r) * sum_{i != j} k_b(r - |x_i - x_j|) / gamma_W(x_i - x_j)``
  with the Epanechnikov kernel ``k_b`` and the window set covariance
  ``gamma_W(h) = |W ∩ (W + h)|``.

Where ``I(r)`` is empty the estimate is ``nan``.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import InsufficientPoints, InvalidArgument

DEFAULT_STEPS = 512


@dataclass(frozen=True)
class Rect:
    u0: float
    u1: float
    v0: float
    v1: float

    def __post_init__(self):
        if not (self.u1 > self.u0 and self.v1 > self.v0):
            raise InvalidArgument("window must have positive area")

    @property
    def area(self):
        return (self.u1 - self.u0) * (self.v1 - self.v0)

    @property
    def inradius(self):
        return 0.5 * min(self.u1 - self.u0, self.v1 - self.v0)

    @property
    def bbox(self):
        return self.u0, self.u1, self.v0, self.v1

    def contains(self, pts, tol=1e-12):
        u, v = pts[:, 0], pts[:, 1]
        return ((u >= self.u0 - tol) & (u <= self.u1 + tol)
                & (v >= self.v0 - tol) & (v <= self.v1 + tol))

    def boundary_distance(self, pts):
        u, v = pts[:, 0], pts[:, 1]
        return np.minimum.reduce([u - self.u0, self.u1 - u, v - self.v0, self.v1 - v])

    def set_covariance(self, du, dv):
        w, h = self.u1 - self.u0, self.v1 - self.v0
        return np.clip(w - np.abs(du), 0, None) * np.clip(h - np.abs(dv), 0, None)

    def scaled(self, s, shift=(0.0, 0.0)):
        return Rect(s * self.u0 + shift[0], s * self.u1 + shift[0],
                    s * self.v0 + shift[1], s * self.v1 + shift[1])

    def to_json(self):
        return [self.u0, self.u1, self.v0, self.v1]


@dataclass(frozen=True)
class Disk:
    cu: float
    cv: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgument("window must have positive area")

    @property
    def area(self):
        return math.pi * self.radius**2

    @property
    def inradius(self):
        return self.radius

    @property
    def bbox(self):
        return (self.cu - self.radius, self.cu + self.radius,
                self.cv - self.radius, self.cv + self.radius)

    def contains(self, pts, tol=1e-12):
        return np.hypot(pts[:, 0] - self.cu, pts[:, 1] - self.cv) <= self.radius + tol

    def boundary_distance(self, pts):
        return self.radius - np.hypot(pts[:, 0] - self.cu, pts[:, 1] - self.cv)

    def set_covariance(self, du, dv):
        d = np.minimum(np.hypot(du, dv), 2 * self.radius)
        r = self.radius
        return 2 * r**2 * np.arccos(d / (2 * r)) - 0.5 * d * np.sqrt(4 * r**2 - d**2)

    def scaled(self, s, shift=(0.0, 0.0)):
        return Disk(s * self.cu + shift[0], s * self.cv + shift[1], s * self.radius)

    def to_json(self):
        return {"disk": [self.cu, self.cv, self.radius]}


def window_from_json(obj):
    if isinstance(obj, dict):
        return Disk(*obj["disk"])
    return Rect(*obj)


@dataclass(frozen=True, eq=False)
class PointPattern:
    """Finite set of points ``(u, v)`` observed in a window."""

    points: np.ndarray
    window: object

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if pts.size and not self.window.contains(pts).all():
            raise InvalidArgument("all points must lie inside the window")
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return len(self.points)

    @property
    def intensity(self):
        return self.n / self.window.area

    @property
    def complex(self):
        return self.points[:, 0] + 1j * self.points[:, 1]

    def __len__(self):
        return self.n

    def scaled(self, s, shift=(0.0, 0.0)):
        return PointPattern(s * self.points + np.asarray(shift), self.window.scaled(s, shift))


@dataclass(frozen=True, eq=False)
class FunctionalCurve:
    statistic: str
    r: np.ndarray
    values: np.ndarray
    correction: str
    n_points: int
    window: Optional[object] = None
    truncated: bool = False
    meta: dict = field(default_factory=dict)


def default_r_grid(window, steps=DEFAULT_STEPS):
    """``steps`` equal steps from 0 towards the window inradius (excluded)."""
    return np.arange(steps) * (window.inradius / steps)


def _check_r(r, window):
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size == 0 or np.any(np.diff(r) <= 0) or r[0] < 0:
        raise InvalidArgument("r grid must be increasing and non-negative")
    if r[-1] > window.inradius + 1e-12:
        raise InvalidArgument(
            f"r_max={r[-1]:.6g} exceeds half the shorter window side {window.inradius:.6g}")
    return r


def _interval_counts(r, start, stop):
    """Per grid point, how many intervals ``[start_i, stop_i)`` contain ``r``."""
    lo = np.searchsorted(r, start, side="left")
    hi = np.searchsorted(r, stop, side="left")
    keep = lo < hi
    diff = np.zeros(len(r) + 1, dtype=np.int64)
    np.add.at(diff, lo[keep], 1)
    np.add.at(diff, hi[keep], -1)
    return np.cumsum(diff[:-1])


def _eligible_counts(r, b):
    # #{i : b_i > r} for each r, b sorted ascending
    b = np.sort(b)
    return len(b) - np.searchsorted(b, r, side="right")


def _ratio(num, den):
    out = np.full(len(num), np.nan)
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    return out


def estimate_K(pattern: PointPattern, r=None):
    """Border-corrected Ripley's K."""
    w = pattern.window
    r = default_r_grid(w) if r is None else _check_r(r, w)
    n = pattern.n
    if n < 2:
        raise InsufficientPoints("K needs at least 2 points")
    pts = pattern.points
    b = w.boundary_distance(pts)
    tree = cKDTree(pts)
    pairs = tree.query_pairs(r[-1], output_type="ndarray")
    if len(pairs):
        d = np.hypot(*(pts[pairs[:, 0]] - pts[pairs[:, 1]]).T)
        # each unordered pair counts once from each end
        start = np.concatenate([d, d])
        stop = np.concatenate([b[pairs[:, 0]], b[pairs[:, 1]]])
        counts = _interval_counts(r, start, stop)
    else:
        counts = np.zeros(len(r), dtype=np.int64)
    n_in = _eligible_counts(r, b)
    values = w.area / (n - 1) * _ratio(counts.astype(float), n_in.astype(float))
    return FunctionalCurve("K", r, values, "border", n, w)


def estimate_L(pattern: PointPattern, r=None):
    K = estimate_K(pattern, r)
    return FunctionalCurve("L", K.r, np.sqrt(K.values / np.pi), "border", K.n_points, K.window)


def estimate_G(pattern: PointPattern, r=None):
    """Border-corrected nearest-neighbour distance distribution."""
    w = pattern.window
    r = default_r_grid(w) if r is None else _check_r(r, w)
    n = pattern.n
    if n < 2:
        raise InsufficientPoints("G needs at least 2 points")
    pts = pattern.points
    d, _ = cKDTree(pts).query(pts, k=2)
    nn = d[:, 1]
    b = w.boundary_distance(pts)
    values = _ratio(_interval_counts(r, nn, b).astype(float), _eligible_counts(r, b).astype(float))
    return FunctionalCurve("G", r, values, "border", n, w)


def reference_grid(window, spacing):
    u0, u1, v0, v1 = window.bbox
    us = np.arange(u0 + spacing / 2, u1, spacing)
    vs = np.arange(v0 + spacing / 2, v1, spacing)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    grid = np.column_stack([uu.ravel(), vv.ravel()])
    return grid[window.contains(grid, tol=0.0)]


def estimate_F(pattern: PointPattern, r=None, ref_grid_spacing=0.05, warn=True):
    """Border-corrected empty-space function on a regular reference grid.

    Radii at which no reference point is eligible are dropped from the curve
    (``truncated=True``), with a warning unless ``warn=False``.
    """
    w = pattern.window
    r = default_r_grid(w) if r is None else _check_r(r, w)
    if ref_grid_spacing <= 0:
        raise InvalidArgument("reference grid spacing must be positive")
    ref = reference_grid(w, ref_grid_spacing)
    b = w.boundary_distance(ref)
    if pattern.n == 0:
        d = np.full(len(ref), np.inf)
    else:
        d, _ = cKDTree(pattern.points).query(ref, k=1)
    n_in = _eligible_counts(r, b)
    values = _ratio(_interval_counts(r, d, b).astype(float), n_in.astype(float))
    truncated = False
    if np.any(n_in == 0):
        last = int(np.argmax(n_in == 0))
        if warn:
            warnings.warn(f"eroded window is empty beyond r={r[last]:.6g}; F truncated",
                          stacklevel=2)
        r, values, truncated = r[:last], values[:last], True
    return FunctionalCurve("F", r, values, "border", pattern.n, w, truncated,
                           {"ref_grid_spacing": ref_grid_spacing})


def epanechnikov(t, b):
    t = np.asarray(t, dtype=float) / b
    return np.where(np.abs(t) < 1, 0.75 / b * (1 - t**2), 0.0)


def _pcf_sums(pattern, r, bandwidth):
    """Unnormalised translation-corrected kernel sums ``(2 pi r)^-1 sum k/gamma``."""
    pts = pattern.points
    w = pattern.window
    pairs = cKDTree(pts).query_pairs(r[-1] + bandwidth, output_type="ndarray")
    if len(pairs) == 0:
        return np.zeros(len(r))
    delta = pts[pairs[:, 0]] - pts[pairs[:, 1]]
    d = np.hypot(delta[:, 0], delta[:, 1])
    weight = 2.0 / w.set_covariance(delta[:, 0], delta[:, 1])  # ordered pairs
    out = np.zeros(len(r))
    pos = np.flatnonzero(r > 0)
    # kernel matrix over (radius, pair), in blocks of radii to bound memory
    step = max(1, 2_000_000 // len(d))
    for s in range(0, len(pos), step):
        idx = pos[s : s + step]
        k = epanechnikov(r[idx, None] - d[None, :], bandwidth)
        out[idx] = (k @ weight) / (2 * np.pi * r[idx])
    return out


def _pcf_r(pattern, r, bandwidth):
    w = pattern.window
    r = default_r_grid(w) if r is None else _check_r(r, w)
    if pattern.n < 2:
        raise InsufficientPoints("pcf needs at least 2 points")
    if bandwidth is None:
        bandwidth = 0.15 / math.sqrt(pattern.intensity)
    if not bandwidth > 0:
        raise InvalidArgument("bandwidth must be positive")
    return r, bandwidth


def estimate_pcf(pattern: PointPattern, r=None, bandwidth=None):
    """Translation-corrected Epanechnikov kernel estimate of the pair correlation.

    Default bandwidth is Stoyan's rule ``0.15 / sqrt(lambda_hat)``. The value at
    ``r = 0`` is undefined and reported as ``nan``.
    """
    r, bandwidth = _pcf_r(pattern, r, bandwidth)
    n = pattern.n
    values = _pcf_sums(pattern, r, bandwidth) * pattern.window.area**2 / (n * (n - 1))
    values[r <= 0] = np.nan
    return FunctionalCurve("pcf", r, values, "translation", n, pattern.window,
                           meta={"bandwidth": bandwidth})


def pooled_pcf(patterns, r, bandwidth):
    """Ratio-pooled pcf: summed kernel sums over summed ``n(n-1)/|W|^2``."""
    num = np.zeros(len(r))
    den = 0.0
    total = 0
    for p in patterns:
        if p.n < 2:
            continue
        rr, _ = _pcf_r(p, r, bandwidth)
        num += _pcf_sums(p, rr, bandwidth)
        den += p.n * (p.n - 1) / p.window.area**2
        total += p.n
    if den == 0:
        raise InsufficientPoints("no pattern has two points")
    values = num / den
    values[np.asarray(r) <= 0] = np.nan
    return FunctionalCurve("pcf", np.asarray(r, float), values, "translation", total,
                           meta={"bandwidth": bandwidth, "pooled": True})


def pool_curves(curves, weights=None):
    """Weighted pointwise mean of curves sharing an r grid (nan-aware)."""
    curves = list(curves)
    if not curves:
        raise InvalidArgument("nothing to pool")
    r = curves[0].r
    for c in curves[1:]:
        if len(c.r) != len(r) or not np.array_equal(c.r, r):
            raise InvalidArgument("curves must share the r grid")
    vals = np.vstack([c.values for c in curves])
    w = np.ones(len(curves)) if weights is None else np.asarray(weights, float)
    ww = np.where(np.isnan(vals), 0.0, w[:, None])
    with np.errstate(invalid="ignore"):
        pooled = np.nansum(vals * w[:, None], axis=0) / ww.sum(axis=0)
    return FunctionalCurve(curves[0].statistic, r, pooled, curves[0].correction,
                           sum(c.n_points for c in curves), curves[0].window,
                           meta={"pooled": len(curves)})


def pooled_L(patterns, r):
    """``L`` from the mean of border-corrected ``K`` estimates."""
    K = pool_curves([estimate_K(p, r) for p in patterns])
    return FunctionalCurve("L", K.r, np.sqrt(K.values / np.pi), "border", K.n_points,
                           K.window, meta=K.meta)


def poisson_pattern(window, intensity, rng):
    """Homogeneous Poisson pattern, used as a control in tests and scripts."""
    n = rng.poisson(intensity * window.area)
    u0, u1, v0, v1 = window.bbox
    if isinstance(window, Rect):
        pts = np.column_stack([rng.uniform(u0, u1, n), rng.uniform(v0, v1, n)])
    else:
        rad = window.radius * np.sqrt(rng.uniform(size=n))
        th = rng.uniform(0, 2 * np.pi, n)
        pts = np.column_stack([window.cu + rad * np.cos(th), window.cv + rad * np.sin(th)])
    return PointPattern(pts, window)


ESTIMATORS = {
    "K": estimate_K,
    "L": estimate_L,
    "F": estimate_F,
    "G": estimate_G,
    "pcf": estimate_pcf,
}
