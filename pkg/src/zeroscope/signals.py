"""Sampled signals: white noise, linear chirps, Hermite test signals, mixing.

Sample convention
-----------------
A sample ``x[m]`` stands for the integral of the underlying signal over the
sampling cell ``[m dt, (m+1) dt)``. For white noise this makes the samples
i.i.d. Gaussians with variance ``dt = 1/fs``; for a deterministic function
``f`` it means ``x[m] ~ f(m dt) dt``, which is what :func:`hermite_signal`
produces. With this convention the discrete STFT in :mod:`zeroscope.stft`
approximates the continuous STFT with no extra factor.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import hermite
from ._random import stream
from .errors import InvalidArgument

Kind = Literal["real", "complex"]


@dataclass(frozen=True, eq=False)
class Signal:
    """Uniformly sampled real or complex sequence."""

    samples: np.ndarray
    fs: float

    def __post_init__(self):
        x = np.asarray(self.samples)
        if x.ndim != 1 or x.size == 0:
            raise InvalidArgument("samples must be a non-empty 1-d sequence")
        if not np.isfinite(self.fs) or self.fs <= 0:
            raise InvalidArgument(f"fs must be positive, got {self.fs}")
        x = x.astype(np.complex128 if np.iscomplexobj(x) else np.float64)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "fs", float(self.fs))

    @property
    def kind(self) -> Kind:
        return "complex" if np.iscomplexobj(self.samples) else "real"

    @property
    def dt(self):
        return 1.0 / self.fs

    @property
    def duration(self):
        return len(self.samples) / self.fs

    @property
    def times(self):
        return np.arange(len(self.samples)) / self.fs

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class ChirpSpec:
    """Linear chirp from ``f0`` to ``f1`` Hz over ``[t_start, t_end]`` s."""

    f0: float
    f1: float
    t_start: float
    t_end: float
    taper_fraction: float = 0.1

    def __post_init__(self):
        if not (0 <= self.t_start < self.t_end):
            raise InvalidArgument("need 0 <= t_start < t_end")
        if not (0 <= self.taper_fraction < 0.5):
            raise InvalidArgument("taper_fraction must lie in [0, 0.5)")
        if self.f0 < 0 or self.f1 < 0:
            raise InvalidArgument("frequencies must be non-negative")

    @property
    def area(self):
        """Time-frequency area swept by the chirp (s * Hz)."""
        return (self.t_end - self.t_start) * abs(self.f1 - self.f0)

    def check(self, fs):
        if max(self.f0, self.f1) > fs / 2:
            raise InvalidArgument(
                f"chirp frequency {max(self.f0, self.f1)} Hz exceeds Nyquist {fs / 2} Hz"
            )


def white_noise(n, fs, seed, kind: Kind = "real", substream=()):
    """Sampled white Gaussian noise with per-sample variance ``1/fs``.

    For ``kind="complex"`` the real and imaginary parts are two independent
    real noises, each with variance ``1/fs``.
    """
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    if fs <= 0:
        raise InvalidArgument("fs must be positive")
    if kind not in ("real", "complex"):
        raise InvalidArgument(f"unknown kind {kind!r}")
    rng = stream(seed, *substream)
    sd = np.sqrt(1.0 / fs)
    if kind == "real":
        x = rng.standard_normal(n) * sd
    else:
        xr = rng.standard_normal(n)
        xi = rng.standard_normal(n)
        x = (xr + 1j * xi) * sd
    return Signal(x, fs)


def raised_cosine_taper(n_support, taper_fraction):
    """Taper of length ``n_support`` with cosine ramps at both ends."""
    w = np.ones(n_support)
    n_ramp = int(round(taper_fraction * n_support))
    if n_ramp > 0:
        ramp = 0.5 * (1 - np.cos(np.pi * (np.arange(n_ramp) + 0.5) / n_ramp))
        w[:n_ramp] = ramp
        w[n_support - n_ramp:] = ramp[::-1]
    return w


def linear_chirp(spec: ChirpSpec, n, fs):
    """Tapered unit-amplitude linear chirp, zero outside its support."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    spec.check(fs)
    t = np.arange(n) / fs
    inside = (t >= spec.t_start) & (t <= spec.t_end)
    x = np.zeros(n)
    if not inside.any():
        return Signal(x, fs)
    tau = t[inside] - spec.t_start
    rate = (spec.f1 - spec.f0) / (spec.t_end - spec.t_start)
    phase = 2 * np.pi * (spec.f0 * tau + 0.5 * rate * tau**2)
    x[inside] = raised_cosine_taper(inside.sum(), spec.taper_fraction) * np.sin(phase)
    return Signal(x, fs)


def hermite_signal(k, n, fs, a=1.0, t_center=0.0, f_center=0.0):
    """Sampled Hermite function ``h_{a,k}`` shifted in time and frequency.

    Returns ``x[m] = dt * h_{a,k}(t_m - t_center) * exp(2i pi f_center t_m)``,
    real when ``f_center == 0``. ``h_{a,k}(x) = sqrt(a) h_k(a x)`` is the
    Hermite function adapted to the window ``g_a``.
    """
    t = np.arange(n) / fs
    x = np.sqrt(a) * hermite.hermite_eval(k, a * (t - t_center)) / fs
    if f_center:
        x = x * np.exp(2j * np.pi * f_center * t)
    return Signal(x, fs)


def noise_variance(noise: Signal):
    """Nominal per-sample variance ``E|n|^2`` of white noise at ``noise.fs``."""
    return (2.0 if noise.kind == "complex" else 1.0) / noise.fs


def mix_snr(signal: Signal, noise: Signal, snr):
    """Return ``c * signal + noise`` with ``c`` set by the requested SNR.

    SNR is the mean squared signal amplitude over the signal's support
    (its non-zero samples) divided by the nominal noise variance per sample.
    """
    if len(signal) != len(noise) or signal.fs != noise.fs:
        raise InvalidArgument("signal and noise must share length and fs")
    if not snr > 0:
        raise InvalidArgument("snr must be positive")
    c = snr_gain(signal, snr, noise_variance(noise))
    return Signal(c * signal.samples + noise.samples, signal.fs)


def snr_gain(signal: Signal, snr, sigma2):
    power = np.abs(signal.samples) ** 2
    support = power > 0
    if not support.any():
        raise InvalidArgument("signal has zero power")
    return np.sqrt(snr * sigma2 / power[support].mean())
