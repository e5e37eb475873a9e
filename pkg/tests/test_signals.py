import numpy as np
import pytest
from hypothesis import given, strategies as st

from zeroscope.errors import InvalidArgument
from zeroscope.signals import (ChirpSpec, Signal, hermite_signal, linear_chirp, mix_snr,
                               noise_variance, raised_cosine_taper, white_noise)


def test_signal_validation():
    with pytest.raises(InvalidArgument):
        Signal(np.zeros(0), 1.0)
    with pytest.raises(InvalidArgument):
        Signal(np.zeros(4), 0.0)
    with pytest.raises(InvalidArgument):
        Signal(np.zeros((2, 2)), 1.0)
    s = Signal([1, 2, 3], 2)
    assert s.kind == "real" and s.samples.dtype == np.float64
    assert s.duration == 1.5 and np.allclose(s.times, [0, 0.5, 1.0])


def test_white_noise_variance_and_determinism():
    fs = 16.0
    x = white_noise(200_000, fs, seed=3)
    assert x.kind == "real"
    assert abs(x.samples.var() * fs - 1) < 0.02
    assert np.array_equal(x.samples, white_noise(200_000, fs, seed=3).samples)
    assert not np.array_equal(x.samples[:10], white_noise(10, fs, seed=3, substream=(1,)).samples)


def test_complex_noise_parts_each_have_variance_dt():
    fs = 8.0
    z = white_noise(200_000, fs, seed=1, kind="complex").samples
    assert abs(z.real.var() * fs - 1) < 0.02 and abs(z.imag.var() * fs - 1) < 0.02
    assert abs(np.mean(z.real * z.imag)) * fs < 0.02
    assert noise_variance(Signal(z, fs)) == 2 / fs


def test_white_noise_rejects_bad_arguments():
    with pytest.raises(InvalidArgument):
        white_noise(0, 1.0, 0)
    with pytest.raises(InvalidArgument):
        white_noise(10, 1.0, 0, kind="pink")


@given(st.integers(4, 400), st.floats(0.0, 0.49))
def test_taper_symmetric_and_bounded(n, frac):
    w = raised_cosine_taper(n, frac)
    assert np.allclose(w, w[::-1])
    assert np.all((w > 0) & (w <= 1))


def test_chirp_support_and_frequency():
    fs = 64.0
    spec = ChirpSpec(4.0, 12.0, 10.0, 50.0, taper_fraction=0.1)
    x = linear_chirp(spec, 4096, fs)
    t = x.times
    assert np.all(x.samples[(t < 10) | (t > 50)] == 0)
    # instantaneous frequency from zero crossings in the untapered middle
    mid = (t > 25) & (t < 35)
    seg = x.samples[mid]
    crossings = np.sum(np.diff(np.sign(seg)) != 0)
    f_mid = 4 + (12 - 4) * 0.5  # at t = 30
    assert abs(crossings / (2 * 10.0) - f_mid) < 0.2
    assert spec.area == 40 * 8


def test_chirp_above_nyquist_rejected():
    with pytest.raises(InvalidArgument):
        linear_chirp(ChirpSpec(1, 20, 0, 1), 100, 32.0)


def test_hermite_signal_norm():
    # sum |x|^2 / dt approximates the L2 norm of h_k, which is 1
    fs = 32.0
    for k in (0, 3, 7):
        x = hermite_signal(k, 2048, fs, a=1.0, t_center=32.0)
        assert abs(np.sum(np.abs(x.samples) ** 2) * fs - 1) < 1e-9


@given(st.floats(0.1, 50.0))
def test_mix_snr_scales_signal(snr):
    fs = 16.0
    s = linear_chirp(ChirpSpec(1, 4, 2, 10), 256, fs)
    zero = Signal(np.zeros(256), fs)
    mixed = mix_snr(s, zero, snr)
    support = s.samples != 0
    assert np.isclose(np.mean(mixed.samples[support] ** 2) / noise_variance(zero), snr)


def test_mix_requires_matching_signals():
    with pytest.raises(InvalidArgument):
        mix_snr(Signal(np.ones(4), 1.0), Signal(np.ones(5), 1.0), 1.0)
    with pytest.raises(InvalidArgument):
        mix_snr(Signal(np.ones(4), 1.0), Signal(np.ones(4), 1.0), 0.0)
