"""Hermite functions adapted to the window ``g(x) = 2^{1/4} exp(-pi x^2)``.

``h_0 = g`` and the family is generated by the three-term recurrence

    h_{k+1}(x) = x sqrt(4 pi / (k+1)) h_k(x) - sqrt(k / (k+1)) h_{k-1}(x),

which is the usual orthonormal recurrence after the substitution
``y = sqrt(2 pi) x``. Their STFT with window ``g`` is known in closed form
and is used to validate :mod:`zeroscope.stft`.
"""

import numpy as np
from scipy.special import gammaln

from .errors import InvalidArgument

_H0 = 2.0**0.25


def _check_order(k):
    if int(k) != k or k < 0:
        raise InvalidArgument(f"order must be a non-negative integer, got {k}")
    return int(k)


def hermite_all(max_order, xs):
    """Values of ``h_0 .. h_max_order`` at ``xs``; shape ``(max_order+1, *xs.shape)``."""
    max_order = _check_order(max_order)
    x = np.asarray(xs, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidArgument("abscissae must be finite")
    out = np.empty((max_order + 1,) + x.shape)
    out[0] = _H0 * np.exp(-np.pi * x**2)
    if max_order >= 1:
        out[1] = x * np.sqrt(4 * np.pi) * out[0]
    for k in range(1, max_order):
        out[k + 1] = (x * np.sqrt(4 * np.pi / (k + 1)) * out[k]
                      - np.sqrt(k / (k + 1)) * out[k - 1])
    return out


def hermite_eval(k, xs):
    """Orthonormal Hermite function ``h_k`` at ``xs``."""
    return hermite_all(k, xs)[_check_order(k)]


def _log_monomial(k, w):
    # log(w^k / sqrt(k!)) with log(0^0) = 0
    w = np.asarray(w, dtype=complex)
    out = np.zeros(w.shape, dtype=complex)
    if k == 0:
        return out
    nz = w != 0
    out[nz] = k * np.log(w[nz]) - 0.5 * gammaln(k + 1)
    out[~nz] = -np.inf
    return out


def bargmann_hermite(k, z):
    """Bargmann transform of ``h_k``: ``pi^{k/2} z^k / sqrt(k!)``."""
    k = _check_order(k)
    z = np.asarray(z, dtype=complex)
    val = np.exp(_log_monomial(k, np.sqrt(np.pi) * z))
    return val if val.ndim else complex(val)


def hermite_stft_closed_form(k, u, v):
    """Closed-form STFT of ``h_k`` with window ``g`` at time ``u``, frequency ``v``.

    ``exp(-i pi u v) exp(-pi (u^2+v^2)/2) pi^{k/2} (u - i v)^k / sqrt(k!)``,
    evaluated in the log domain so large orders do not overflow.
    """
    k = _check_order(k)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    log_val = (-1j * np.pi * u * v - 0.5 * np.pi * (u**2 + v**2)
               + _log_monomial(k, np.sqrt(np.pi) * (u - 1j * v)))
    val = np.exp(log_val)
    return val if val.ndim else complex(val)
