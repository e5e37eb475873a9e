import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from zeroscope import detect as D
from zeroscope.errors import InvalidArgument, Unsupported
from zeroscope.ppstats import FunctionalCurve, PointPattern, Rect
from zeroscope.signals import white_noise
from zeroscope.stft import GridSpec, zeros_of_signal

SMALL = GridSpec.square(64)


def curve(r, v):
    return FunctionalCurve("F", np.asarray(r, float), np.asarray(v, float), "border", 0)


def noise_pattern(grid, seed, key=0):
    x = white_noise(grid.N + 1, grid.fs, seed, "real", (0, key))
    return zeros_of_signal(x, grid)


def test_statistic_identical_and_constant():
    r = np.linspace(0, 2, 201)
    base = np.sin(r)
    assert D.test_statistic(curve(r, base), curve(r, base), "sup", 0, 2) == 0
    assert D.test_statistic(curve(r, base), curve(r, base), "two", 0, 2) == 0
    c = -0.3
    a, b = curve(r, base + c), curve(r, base)
    assert D.test_statistic(a, b, "sup", 0.5, 1.5) == pytest.approx(abs(c), abs=1e-15)
    assert D.test_statistic(a, b, "two", 0.5, 1.5) == pytest.approx(abs(c) * math.sqrt(1.0),
                                                                    rel=1e-12)


def test_statistic_against_riemann_oracle():
    r = np.linspace(0, 3, 97)
    d = np.where(r < 1, r, np.where(r < 2, 2 - r, 0.5 * (r - 2)))
    t2 = D.test_statistic(curve(r, d), curve(r, 0 * r), "two", 0.25, 2.75)
    sel = (r >= 0.25) & (r <= 2.75)
    rs, ds = r[sel], d[sel]
    oracle = math.sqrt(sum(0.5 * (ds[i] ** 2 + ds[i + 1] ** 2) * (rs[i + 1] - rs[i])
                           for i in range(len(rs) - 1)))
    assert abs(t2 - oracle) < 1e-12


def test_statistic_errors():
    r = np.linspace(0, 1, 11)
    with pytest.raises(InvalidArgument):
        D.test_statistic(curve(r, r), curve(r[:-1], r[:-1]), "two", 0, 1)
    with pytest.raises(InvalidArgument):
        D.test_statistic(curve(r, r), curve(r, r), "three", 0, 1)
    v = r.copy()
    v[5] = np.nan
    with pytest.raises(InvalidArgument):
        D.test_statistic(curve(r, v), curve(r, r), "sup", 0, 1)


@given(st.integers(0, 1000))
def test_statistics_monotone_in_rmax(seed):
    r = np.linspace(0, 2, 81)
    rng = np.random.default_rng(seed)
    a, b = curve(r, rng.normal(size=81)), curve(r, 0 * r)
    for norm in ("sup", "two"):
        t = [D.test_statistic(a, b, norm, 0, rm) for rm in r[2:]]
        assert np.all(np.diff(t) >= 0)


def test_config_validation():
    cfg = D.TestConfig()
    assert cfg.alpha == 0.05 and cfg.m == 199 and cfg.k == 10
    assert cfg.statistic == "F" and cfg.norm == "two" and cfg.null_curve == "pointwise_average"
    assert cfg.r_max == cfg.half_window
    with pytest.raises(InvalidArgument):
        D.TestConfig(m=5, k=6)
    with pytest.raises(InvalidArgument):
        D.TestConfig(r_max=100.0)
    with pytest.raises(InvalidArgument):
        D.TestConfig(r_min=1.0, r_max=0.5)
    with pytest.raises(InvalidArgument):
        D.TestConfig(statistic="G")
    assert "workers" not in cfg.to_json()


def test_decision_rule_ties_against_rejection():
    cfg = D.TestConfig(m=4, k=2, grid=SMALL)
    res = D._decide(3.0, [5.0, 3.0, 1.0, 0.0], cfg)
    assert not res.reject and res.rank == 3
    res = D._decide(3.0 + 1e-9, [5.0, 3.0, 1.0, 0.0], cfg)
    assert res.reject and res.rank == 2
    assert list(res.t_sorted) == [5.0, 3.0, 1.0, 0.0]


@given(st.lists(st.integers(0, 40), min_size=5, max_size=5), st.integers(0, 40))
def test_decision_invariant_to_increasing_transform(t_null, t_exp):
    cfg = D.TestConfig(m=5, k=2, grid=SMALL)
    a = D._decide(float(t_exp), [float(t) for t in t_null], cfg)
    b = D._decide(math.exp(t_exp) + 1, list(np.exp(t_null) + 1), cfg)
    assert a.reject == b.reject and a.rank == b.rank


def test_clopper_pearson():
    lo, hi = D.clopper_pearson(10, 200, 0.95)
    assert abs(lo - 0.0243) < 5e-4 and abs(hi - 0.0905) < 5e-4
    assert abs(lo - stats.beta.ppf(0.025, 10, 191)) < 1e-9
    assert abs(hi - stats.beta.ppf(0.975, 11, 190)) < 1e-9
    assert D.clopper_pearson(0, 30, 0.9)[0] == 0.0
    assert D.clopper_pearson(30, 30, 0.9)[1] == 1.0
    with pytest.raises(InvalidArgument):
        D.clopper_pearson(5, 4, 0.95)
    with pytest.raises(InvalidArgument):
        D.clopper_pearson(1, 4, 1.5)


@given(st.integers(1, 60), st.data(), st.floats(0.5, 0.999))
def test_clopper_pearson_against_beta_quantiles(n, data, conf):
    x = data.draw(st.integers(0, n))
    lo, hi = D.clopper_pearson(x, n, conf)
    a = (1 - conf) / 2
    ref_lo = 0.0 if x == 0 else stats.beta.ppf(a, x, n - x + 1)
    ref_hi = 1.0 if x == n else stats.beta.ppf(1 - a, x + 1, n - x)
    assert abs(lo - ref_lo) < 1e-8 and abs(hi - ref_hi) < 1e-8
    assert lo <= x / n <= hi


def test_rank_uniformity():
    ranks = np.tile(np.arange(1, 21), 10)
    assert D.rank_uniformity_test(ranks, 19) == pytest.approx(1.0)
    assert D.rank_uniformity_test(np.ones(200, int), 19) < 1e-10
    with pytest.raises(InvalidArgument):
        D.rank_uniformity_test([0, 1], 19)


def test_envelope_test_deterministic_and_thread_independent():
    cfg = D.TestConfig(m=9, k=1, grid=SMALL, seed=5)
    p = noise_pattern(SMALL, 5)
    a = D.envelope_test(p, cfg)
    b = D.envelope_test(p, D.TestConfig(m=9, k=1, grid=SMALL, seed=5, workers=3))
    assert a.to_json() == b.to_json()
    assert len(a.t_sorted) == 9 and 1 <= a.rank <= 10 and a.alpha == 0.1


def test_theoretical_mode():
    p = noise_pattern(SMALL, 1)
    with pytest.raises(Unsupported):
        D.envelope_test(p, D.TestConfig(m=3, k=1, grid=SMALL, null_curve="theoretical"))
    res = D.envelope_test(p, D.TestConfig(m=3, k=1, grid=SMALL, statistic="L",
                                          null_curve="theoretical"))
    assert np.isfinite(res.t_exp)


def test_window_mismatch():
    p = PointPattern(np.zeros((0, 2)), Rect(0, 1, 0, 1))
    with pytest.raises(InvalidArgument):
        D.envelope_test(p, D.TestConfig(m=3, k=1, grid=SMALL))


def test_m1_k1_rejects_half_the_time():
    # with a fixed reference curve the two statistics are exchangeable
    rejections = 0
    n = 120
    for s in range(n):
        cfg = D.TestConfig(m=1, k=1, grid=SMALL, seed=s, statistic="L",
                           null_curve="theoretical")
        rejections += D.envelope_test(noise_pattern(SMALL, s), cfg).reject
    assert abs(rejections / n - 0.5) < 3 * math.sqrt(0.25 / n)


def test_m1_pointwise_average_is_an_exact_tie():
    # the averaged reference makes t_exp and t_1 equal, so the test never rejects
    for s in range(10):
        res = D.envelope_test(noise_pattern(SMALL, s), D.TestConfig(m=1, k=1, grid=SMALL, seed=s))
        assert res.t_exp == pytest.approx(res.t_sorted[0], rel=1e-12) and not res.reject


def test_envelope_curves():
    cfg = D.TestConfig(m=9, k=1, grid=SMALL, seed=2)
    p = noise_pattern(SMALL, 2)
    r_max = cfg.r_max * np.linspace(0.1, 1, 8)
    rows = D.envelope_curves(p, cfg, r_max)
    assert [row["r_max"] for row in rows] == list(r_max)
    t_exp = [row["t_exp"] for row in rows]
    t_k = [row["t_k"] for row in rows]
    assert np.all(np.diff(t_exp) >= 0) and np.all(np.diff(t_k) >= 0)
    assert rows == D.envelope_curves(p, cfg, r_max)


def test_estimate_power_null_and_invariants():
    cfg = D.TestConfig(m=9, k=1, grid=SMALL, seed=4)
    sig = white_noise(SMALL.N + 1, SMALL.fs, 99)  # any real signal; snr=0 ignores it
    for fresh in (True, False):
        est = D.estimate_power(sig, 0.0, cfg, reps=30, n_rmax_tests=2,
                               r_max_values=[cfg.r_max / 2, cfg.r_max], fresh_null=fresh)
        assert len(est) == 2
        for e in est:
            lo, hi = e.cp_interval
            assert lo <= e.beta_hat <= hi and e.bonferroni_m == 2
            assert e.confidence == pytest.approx(0.975)
            assert lo <= cfg.alpha <= hi
    with pytest.raises(InvalidArgument):
        D.estimate_power(sig, 1.0, cfg, reps=0)
    with pytest.raises(InvalidArgument):
        D.estimate_power(white_noise(10, SMALL.fs, 0), 1.0, cfg, reps=1)
