import mpmath as mp
import numpy as np
import pytest

from zeroscope.errors import InvalidArgument
from zeroscope.hermite import (bargmann_hermite, hermite_all, hermite_eval,
                               hermite_stft_closed_form)


def mp_hermite(k, x):
    # h_k(x) = 2^{1/4} / sqrt(2^k k!) H_k(sqrt(2 pi) x) exp(-pi x^2)
    mp.mp.dps = 50
    y = mp.sqrt(2 * mp.pi) * x
    return (mp.mpf(2) ** 0.25 / mp.sqrt(mp.mpf(2) ** k * mp.factorial(k))
            * mp.hermite(k, y) * mp.exp(-mp.pi * x**2))


@pytest.mark.parametrize("k", [0, 1, 2, 5, 13, 30, 64])
def test_against_mpmath(k):
    xs = np.linspace(-6, 6, 49)
    ours = hermite_eval(k, xs)
    ref = np.array([float(mp_hermite(k, mp.mpf(x))) for x in xs])
    assert np.max(np.abs(ours - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))


def test_orthonormality():
    x = np.linspace(-8, 8, 8001)
    H = hermite_all(10, x)
    G = np.trapezoid(H[:, None, :] * H[None, :, :], x, axis=2)
    assert np.max(np.abs(G - np.eye(11))) <= 1e-6


def test_simple_values():
    assert np.isclose(hermite_eval(0, 0.0), 2**0.25)
    assert hermite_eval(1, 0.0) == 0.0
    assert np.isclose(abs(bargmann_hermite(2, 1.0)), np.pi / np.sqrt(2))


def test_closed_form_values():
    assert hermite_stft_closed_form(3, 0.0, 0.0) == 0
    assert np.isclose(hermite_stft_closed_form(0, 0.0, 0.0), 1.0)
    v = hermite_stft_closed_form(3, 1.0, 0.0)
    assert np.isclose(abs(v), np.exp(-np.pi / 2) * np.pi**1.5 / np.sqrt(6), rtol=1e-12)
    assert abs(abs(v) - 0.47256) < 1e-5


def test_closed_form_large_order_no_overflow():
    v = hermite_stft_closed_form(400, 5.0, 5.0)
    assert np.isfinite(v)


def test_bad_order():
    with pytest.raises(InvalidArgument):
        hermite_eval(-1, 0.0)
    with pytest.raises(InvalidArgument):
        hermite_eval(1.5, 0.0)
    with pytest.raises(InvalidArgument):
        hermite_eval(2, np.array([0.0, np.inf]))
