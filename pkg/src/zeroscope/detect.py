"""Monte Carlo envelope tests of "this zero pattern comes from white noise".

The null hypothesis is real white noise. ``m`` null spectrograms are simulated
on the test grid, their zeros summarised by a functional statistic (``L`` or
``F``), and the data curve is compared to a reference curve ``S0`` through a
norm of the difference. With ``t_exp`` the data value and ``t_1..t_m`` the
null values, the test rejects when ``t_exp`` is strictly larger than the
``k``-th largest ``t_i``; its level is ``k / (m + 1)``.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Optional

import numpy as np
from scipy import stats
from scipy.special import betainc

from . import theory
from ._parallel import pmap
from ._random import DATA, NULL
from .errors import InvalidArgument, Unsupported
from .ppstats import FunctionalCurve, PointPattern, estimate_F, estimate_L
from .signals import Signal, mix_snr, white_noise
from .stft import GridSpec, zeros_of_signal


@dataclass(frozen=True)
class TestConfig:
    """Envelope-test settings.

    ``r_max=None`` means half the shorter side of the crop window. ``workers``
    only changes how the null simulations are scheduled, never the result,
    and is left out of :meth:`to_json`.
    """

    __test__ = False  # not a pytest class

    statistic: Literal["L", "F"] = "F"
    norm: Literal["sup", "two"] = "two"
    r_min: float = 0.0
    r_max: Optional[float] = None
    m: int = 199
    k: int = 10
    null_curve: Literal["pointwise_average", "theoretical"] = "pointwise_average"
    grid: GridSpec = field(default_factory=lambda: GridSpec.square(256))
    seed: int = 0
    n_r: int = 512
    refine: bool = False
    ref_grid_spacing: float = 0.05
    workers: Optional[int] = 1

    def __post_init__(self):
        if self.statistic not in ("L", "F"):
            raise InvalidArgument(f"statistic must be L or F, got {self.statistic!r}")
        if self.norm not in ("sup", "two"):
            raise InvalidArgument(f"norm must be sup or two, got {self.norm!r}")
        if self.null_curve not in ("pointwise_average", "theoretical"):
            raise InvalidArgument(f"unknown null curve {self.null_curve!r}")
        if not (1 <= self.k <= self.m):
            raise InvalidArgument(f"need 1 <= k <= m, got k={self.k}, m={self.m}")
        if self.n_r < 2:
            raise InvalidArgument("n_r must be >= 2")
        half = self.half_window
        r_max = half if self.r_max is None else float(self.r_max)
        if not (0 <= self.r_min < r_max <= half + 1e-12):
            raise InvalidArgument(
                f"need 0 <= r_min < r_max <= {half:.6g}, got [{self.r_min}, {r_max}]")
        object.__setattr__(self, "r_max", r_max)

    @property
    def alpha(self):
        return self.k / (self.m + 1)

    @property
    def window(self):
        return self.grid.crop_window

    @property
    def half_window(self):
        return self.grid.crop_window.inradius

    def r_grid(self, r_max=None):
        """``n_r`` equispaced radii from 0 up to, but excluding, ``r_max``."""
        r_max = self.r_max if r_max is None else r_max
        return np.arange(self.n_r) * (r_max / self.n_r)

    def to_json(self):
        return {
            "statistic": self.statistic, "norm": self.norm, "r_min": self.r_min,
            "r_max": self.r_max, "m": self.m, "k": self.k, "null_curve": self.null_curve,
            "grid": self.grid.to_json(), "seed": self.seed, "n_r": self.n_r,
            "refine": self.refine, "ref_grid_spacing": self.ref_grid_spacing,
        }


@dataclass(frozen=True, eq=False)
class EnvelopeTestResult:
    t_exp: float
    t_sorted: np.ndarray
    rank: int
    reject: bool
    alpha: float
    cfg: Optional[TestConfig] = None

    def to_json(self):
        return {
            "alpha": self.alpha, "t_exp": self.t_exp,
            "t_sorted": [float(t) for t in self.t_sorted], "rank": self.rank,
            "reject": self.reject, "cfg": None if self.cfg is None else self.cfg.to_json(),
        }


@dataclass(frozen=True)
class PowerEstimate:
    rejections: int
    reps: int
    beta_hat: float
    cp_interval: tuple
    bonferroni_m: int
    r_max: float
    confidence: float = 0.95


def test_statistic(S_hat: FunctionalCurve, S_0: FunctionalCurve, norm, r_min, r_max):
    """Sup or L2 norm of ``S_hat - S_0`` over grid points in ``[r_min, r_max]``.

    The L2 norm is the trapezoid rule on the restricted grid points.
    """
    r = np.asarray(S_hat.r, dtype=float)
    if len(r) != len(S_0.r) or not np.allclose(r, S_0.r, rtol=0, atol=1e-12):
        raise InvalidArgument("curves must share the r grid")
    sel = (r >= r_min - 1e-12) & (r <= r_max + 1e-12)
    if sel.sum() < (1 if norm == "sup" else 2):
        raise InvalidArgument(f"[{r_min}, {r_max}] holds too few grid points")
    d = np.asarray(S_hat.values, float)[sel] - np.asarray(S_0.values, float)[sel]
    if not np.all(np.isfinite(d)):
        raise InvalidArgument("curve undefined on part of [r_min, r_max]")
    if norm == "sup":
        return float(np.max(np.abs(d)))
    if norm == "two":
        return float(math.sqrt(np.trapezoid(d**2, r[sel])))
    raise InvalidArgument(f"unknown norm {norm!r}")


def _curve(pattern, cfg, r):
    if cfg.statistic == "L":
        return estimate_L(pattern, r)
    # the eroded window can run out just below the inradius; all curves of one
    # test share the window, so they are truncated identically
    return estimate_F(pattern, r, cfg.ref_grid_spacing, warn=False)


def _null_curve(cfg, r, key):
    noise = white_noise(cfg.grid.N + 1, cfg.grid.fs, cfg.seed, "real", (NULL, *key))
    return _curve(zeros_of_signal(noise, cfg.grid, refine=cfg.refine), cfg, r)


def simulate_null_curves(cfg: TestConfig, null_key=(), r=None):
    """The ``m`` null curves, null simulation ``i`` drawn from ``(seed, NULL, *null_key, i)``."""
    r = cfg.r_grid() if r is None else r
    return pmap(lambda i: _null_curve(cfg, r, (*null_key, i)), range(cfg.m), cfg.workers)


def _check_window(pattern, cfg):
    if not np.allclose(pattern.window.bbox, cfg.window.bbox, rtol=0, atol=1e-9):
        raise InvalidArgument(
            f"data window {pattern.window} does not match the grid crop {cfg.window}")


def _common_length(curves):
    # cut every curve at the first radius where any of them is undefined; with
    # border correction this only happens within a few steps of the inradius
    n = min(len(c.r) for c in curves)
    bad = ~np.all(np.isfinite(np.vstack([c.values[:n] for c in curves])), axis=0)
    if bad.any():
        n = int(np.argmax(bad))
    if n < 2:
        raise InvalidArgument("statistic undefined on the requested r range")
    return [c if len(c.r) == n else replace(c, r=c.r[:n], values=c.values[:n])
            for c in curves]


def _reference(cfg, data, null):
    if cfg.null_curve == "theoretical":
        if cfg.statistic != "L":
            raise Unsupported("no closed-form null curve for F; use pointwise_average")
        _, L0 = theory.K0_L0("gaf", data.r)
        return FunctionalCurve("L", data.r, L0.values, "theory", 0, data.window)
    vals = np.vstack([c.values for c in null] + [data.values])
    return FunctionalCurve(data.statistic, data.r, vals.mean(axis=0), data.correction,
                           0, data.window, meta={"pointwise_average": len(vals)})


TIE_RTOL = 1e-12


def _decide(t_exp, t_null, cfg):
    """Rank and decision; values within ``TIE_RTOL`` of ``t_exp`` count as ties.

    Ties are resolved against rejection. The tolerance matters when ties are
    exact in real arithmetic but not after rounding, e.g. ``m = 1`` with the
    pointwise-average reference, where ``t_exp`` and ``t_1`` are both half the
    norm of the difference of the two curves.
    """
    t_sorted = np.sort(np.asarray(t_null, dtype=float))[::-1]
    tied = np.abs(t_sorted - t_exp) <= TIE_RTOL * np.maximum(np.abs(t_sorted), abs(t_exp))
    at_least = (t_sorted >= t_exp) | tied
    rank = 1 + int(np.sum(at_least))
    # reject iff t_exp strictly exceeds the k-th largest, i.e. rank <= k
    reject = rank <= cfg.k
    return EnvelopeTestResult(float(t_exp), t_sorted, rank, bool(reject), cfg.alpha, cfg)


def _prepare(data_pattern, cfg, null_key, null_curves):
    if cfg.null_curve == "theoretical" and cfg.statistic != "L":
        raise Unsupported("no closed-form null curve for F; use pointwise_average")
    _check_window(data_pattern, cfg)
    r = cfg.r_grid()
    data = _curve(data_pattern, cfg, r)
    null = simulate_null_curves(cfg, null_key, r) if null_curves is None else null_curves
    curves = _common_length([data, *null])
    data, null = curves[0], curves[1:]
    return data, null, _reference(cfg, data, null)


def envelope_test(data_pattern: PointPattern, cfg: TestConfig, null_key=(), null_curves=None):
    """Envelope test of ``data_pattern`` against ``cfg.m`` white-noise simulations."""
    data, null, S0 = _prepare(data_pattern, cfg, null_key, null_curves)
    t = [test_statistic(c, S0, cfg.norm, cfg.r_min, cfg.r_max) for c in (data, *null)]
    return _decide(t[0], t[1:], cfg)


def envelope_curves(data_pattern: PointPattern, cfg: TestConfig, r_max_values, null_key=()):
    """``t_exp`` and the envelope ``t_k`` for each ``r_max``, with ``r_min = 0``.

    The curves are computed once on ``cfg``'s grid; each row restricts the
    norm to ``[0, r_max]``. No family-wise guarantee holds across rows.
    """
    data, null, S0 = _prepare(data_pattern, cfg, null_key, None)
    rows = []
    for r_max in np.asarray(r_max_values, dtype=float):
        t = [test_statistic(c, S0, cfg.norm, 0.0, r_max) for c in (data, *null)]
        res = _decide(t[0], t[1:], cfg)
        rows.append({"r_max": float(r_max), "t_exp": res.t_exp,
                     "t_k": float(res.t_sorted[cfg.k - 1]), "reject": res.reject})
    return rows


def _bisect_beta(a, b, target, tol=1e-10):
    # smallest p in [0, 1] with I_p(a, b) >= target; I_p is increasing in p
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if betainc(a, b, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def clopper_pearson(successes, trials, confidence=0.95):
    """Exact binomial interval by bisection on the regularized incomplete beta."""
    if not (0 <= successes <= trials and trials >= 1):
        raise InvalidArgument("need 0 <= successes <= trials, trials >= 1")
    if not 0 < confidence < 1:
        raise InvalidArgument("confidence must lie in (0, 1)")
    tail = (1 - confidence) / 2
    x, n = successes, trials
    lo = 0.0 if x == 0 else _bisect_beta(x, n - x + 1, tail)
    hi = 1.0 if x == n else _bisect_beta(x + 1, n - x, 1 - tail)
    return lo, hi


def rank_uniformity_test(ranks, m):
    """Chi-squared test that ranks are uniform on ``1..m+1``; returns the p-value."""
    ranks = np.asarray(ranks, dtype=int)
    if np.any((ranks < 1) | (ranks > m + 1)):
        raise InvalidArgument("ranks must lie in 1..m+1")
    counts = np.bincount(ranks - 1, minlength=m + 1)
    return float(stats.chisquare(counts).pvalue)


def estimate_power(signal: Signal, snr, cfg: TestConfig, reps, confidence=0.95,
                   n_rmax_tests=1, r_max_values=None, fresh_null=True):
    """Rejection rate of the envelope test on ``signal`` buried in real white noise.

    Replicate ``i`` mixes ``signal`` with noise from ``(seed, DATA, i)`` at the
    given SNR (``snr=0`` means noise alone) and runs the test against null
    simulations keyed by ``i`` (``fresh_null=True``) or shared by all
    replicates. Intervals are Clopper-Pearson at level
    ``1 - (1 - confidence) / n_rmax_tests``.
    """
    if reps < 1:
        raise InvalidArgument("reps must be >= 1")
    if snr < 0:
        raise InvalidArgument("snr must be non-negative")
    if n_rmax_tests < 1:
        raise InvalidArgument("n_rmax_tests must be >= 1")
    if len(signal) != cfg.grid.N + 1 or not math.isclose(signal.fs, cfg.grid.fs):
        raise InvalidArgument(f"signal must have {cfg.grid.N + 1} samples at fs={cfg.grid.fs}")
    r_max_values = [cfg.r_max] if r_max_values is None else [float(x) for x in r_max_values]
    for r_max in r_max_values:
        if not cfg.r_min < r_max <= cfg.r_max + 1e-12:
            raise InvalidArgument(f"r_max={r_max} outside ({cfg.r_min}, {cfg.r_max}]")
    shared = None if fresh_null else simulate_null_curves(cfg)

    def one(i):
        noise = white_noise(len(signal), signal.fs, cfg.seed, signal.kind, (DATA, i))
        x = mix_snr(signal, noise, snr) if snr > 0 else noise
        pattern = zeros_of_signal(x, cfg.grid, refine=cfg.refine)
        data, null, S0 = _prepare(pattern, cfg, (i,), shared)
        out = []
        for r_max in r_max_values:
            t = [test_statistic(c, S0, cfg.norm, cfg.r_min, r_max) for c in (data, *null)]
            out.append(_decide(t[0], t[1:], cfg).reject)
        return out

    # replicates run serially; each one parallelises its own null simulations
    decisions = np.array([one(i) for i in range(reps)], dtype=bool).reshape(reps, -1)
    level = 1 - (1 - confidence) / n_rmax_tests
    result = []
    for j, r_max in enumerate(r_max_values):
        x = int(decisions[:, j].sum())
        result.append(PowerEstimate(x, reps, x / reps, clopper_pearson(x, reps, level),
                                    n_rmax_tests, r_max, level))
    return result
