import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zeroscope._random import POISSON, stream
from zeroscope.errors import InsufficientPoints, InvalidArgument
from zeroscope.ppstats import (Disk, PointPattern, Rect, default_r_grid, epanechnikov,
                               estimate_F, estimate_G, estimate_K, estimate_L,
                               estimate_pcf, pool_curves, pooled_L, pooled_pcf,
                               poisson_pattern, reference_grid, window_from_json)

W = Rect(0.0, 6.0, 0.0, 4.0)


def random_pattern(seed, n=60, window=W):
    rng = np.random.default_rng(seed)
    u0, u1, v0, v1 = window.bbox
    pts = np.column_stack([rng.uniform(u0, u1, 4 * n), rng.uniform(v0, v1, 4 * n)])
    pts = pts[window.contains(pts, tol=0)][:n]
    return PointPattern(pts, window)


def brute_K(p, r):
    x, w = p.points, p.window
    b = w.boundary_distance(x)
    out = []
    for ri in r:
        inner = [i for i in range(p.n) if b[i] > ri]
        if not inner:
            out.append(np.nan)
            continue
        c = sum(1 for i in inner for j in range(p.n)
                if j != i and math.dist(x[i], x[j]) <= ri)
        out.append(w.area / (p.n - 1) * c / len(inner))
    return np.array(out)


def brute_nn_dist(x, y, exclude_self):
    d = np.hypot(x[:, None, 0] - y[None, :, 0], x[:, None, 1] - y[None, :, 1])
    if exclude_self:
        np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def brute_G(p, r, ref=None):
    centres = p.points if ref is None else ref
    d = brute_nn_dist(centres, p.points, ref is None)
    b = p.window.boundary_distance(centres)
    out = []
    for ri in r:
        m = b > ri
        out.append(np.nan if not m.any() else np.mean(d[m] <= ri))
    return np.array(out)


def brute_pcf(p, r, bw):
    x, w = p.points, p.window
    tot = np.zeros(len(r))
    for i in range(p.n):
        for j in range(p.n):
            if i == j:
                continue
            h = x[i] - x[j]
            d = math.hypot(*h)
            tot += epanechnikov(r - d, bw) / w.set_covariance(h[0], h[1])
    return w.area**2 / (p.n * (p.n - 1)) * tot / (2 * np.pi * r)


@pytest.mark.parametrize("window", [W, Disk(1.0, -1.0, 2.5)])
def test_K_matches_brute_force(window):
    p = random_pattern(1, 50, window)
    r = np.linspace(0, window.inradius * 0.98, 40)
    assert np.allclose(estimate_K(p, r).values, brute_K(p, r), rtol=1e-12, equal_nan=True)
    L = estimate_L(p, r)
    assert np.allclose(L.values, np.sqrt(brute_K(p, r) / np.pi), equal_nan=True)


def test_G_and_F_match_brute_force():
    p = random_pattern(2, 40)
    r = np.linspace(0, 1.9, 30)
    assert np.allclose(estimate_G(p, r).values, brute_G(p, r), equal_nan=True)
    ref = reference_grid(W, 0.1)
    F = estimate_F(p, r, ref_grid_spacing=0.1)
    assert np.allclose(F.values, brute_G(p, r, ref), equal_nan=True)


def test_pcf_matches_brute_force():
    p = random_pattern(3, 40)
    r = np.linspace(0.05, 1.9, 25)
    g = estimate_pcf(p, r, bandwidth=0.2)
    assert np.allclose(g.values, brute_pcf(p, r, 0.2), rtol=1e-10)
    assert math.isnan(estimate_pcf(p, np.array([0.0, 0.5]), 0.2).values[0])


def test_set_covariance():
    assert W.set_covariance(0.0, 0.0) == W.area
    assert W.set_covariance(1.0, -1.0) == 5.0 * 3.0
    d = Disk(0, 0, 1.0)
    assert np.isclose(d.set_covariance(0.0, 0.0), np.pi)
    assert np.isclose(d.set_covariance(2.0, 0.0), 0.0)
    # Monte Carlo check of the lens area at |h| = 0.7
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 1, (400_000, 2))
    inside = (np.hypot(*pts.T) <= 1) & (np.hypot(pts[:, 0] - 0.7, pts[:, 1]) <= 1)
    assert abs(4 * inside.mean() - d.set_covariance(0.7, 0.0)) < 0.01


@given(st.integers(0, 10_000))
def test_scaling_by_two_is_exact(seed):
    p = random_pattern(seed, 30)
    q = p.scaled(2.0)
    r = np.linspace(0, 1.8, 19)
    assert np.allclose(estimate_K(q, 2 * r).values, 4 * estimate_K(p, r).values,
                       rtol=1e-12, equal_nan=True)
    assert np.allclose(estimate_G(q, 2 * r).values, estimate_G(p, r).values, equal_nan=True)
    rr = r[1:]
    assert np.allclose(estimate_pcf(q, 2 * rr, 0.6).values, estimate_pcf(p, rr, 0.3).values,
                       rtol=1e-10)


@given(st.integers(0, 10_000), st.floats(-3, 3), st.floats(-3, 3))
def test_translation_invariance(seed, du, dv):
    p = random_pattern(seed, 30)
    q = p.scaled(1.0, (du, dv))
    r = np.linspace(0, 1.8, 10)
    assert np.allclose(estimate_K(q, r).values, estimate_K(p, r).values, rtol=1e-9,
                       equal_nan=True)


@given(st.integers(0, 10_000))
def test_estimator_ranges(seed):
    # border correction changes the eligible set with r, so monotonicity is
    # not guaranteed; only the ranges are
    p = random_pattern(seed, 30)
    r = np.linspace(0, 1.9, 40)
    for est in (estimate_G, estimate_F):
        v = est(p, r).values
        v = v[np.isfinite(v)]
        assert np.all((v >= 0) & (v <= 1)) and v[0] == 0
    K = estimate_K(p, r).values
    assert np.all(K[np.isfinite(K)] >= 0)


def test_r_grid_checks():
    p = random_pattern(4, 20)
    assert len(default_r_grid(W)) == 512 and default_r_grid(W)[-1] < W.inradius
    with pytest.raises(InvalidArgument):
        estimate_K(p, np.array([0.0, 2.5]))
    with pytest.raises(InvalidArgument):
        estimate_K(p, np.array([0.5, 0.1]))
    with pytest.raises(InsufficientPoints):
        estimate_K(PointPattern(np.zeros((1, 2)) + 1, W), np.array([0.0, 1.0]))


def test_points_outside_window_rejected():
    with pytest.raises(InvalidArgument):
        PointPattern(np.array([[7.0, 1.0]]), W)


def test_F_truncation_warns():
    p = random_pattern(5, 30)
    with pytest.warns(UserWarning):
        F = estimate_F(p, np.linspace(0, 2.0, 41), ref_grid_spacing=0.3)
    assert F.truncated and len(F.r) < 41


def test_window_json_roundtrip():
    for w in (W, Disk(0.5, 1.0, 2.0)):
        assert window_from_json(w.to_json()) == w


def test_poisson_control_L():
    window = Rect(0.0, 20.0, 0.0, 20.0)
    r = np.linspace(0, 2, 101)
    pats = [poisson_pattern(window, 1.0, stream(0, POISSON, i)) for i in range(20)]
    L = pooled_L(pats, r)
    assert np.max(np.abs(L.values - r)) < 0.03


def test_pooling():
    window = Rect(0.0, 12.0, 0.0, 12.0)
    pats = [poisson_pattern(window, 1.0, stream(1, POISSON, i)) for i in range(10)]
    r = np.linspace(0.3, 2, 30)
    g = pooled_pcf(pats, r, 0.2)
    assert np.max(np.abs(g.values - 1)) < 0.15
    curves = [estimate_G(p, r) for p in pats]
    mean = pool_curves(curves)
    assert np.allclose(mean.values, np.mean([c.values for c in curves], axis=0))
    with pytest.raises(InvalidArgument):
        pool_curves([curves[0], estimate_G(pats[0], r[:-1])])
