"""Reference statistics for planar-GAF zeros, Ginibre and Poisson patterns."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

SERIES_SWITCH = 1e-3

# g0 as a function of x = pi r^2 / 2, Taylor coefficients of x^(2j+1)
_G0_SERIES = (1.0, -2 / 9, 2 / 45, -4 / 525, 2 / 1701, -2764 / 16372125)
# S(y) * 2 sqrt(pi) as a function of s = 4 pi y^2
_S_SERIES = (1.0, 1 / 4, 1 / 96, -1 / 384, -1 / 10240, 19 / 368640)


@dataclass(frozen=True, eq=False)
class TheoryCurve:
    kind: str
    r: np.ndarray
    values: np.ndarray


def _g0_x(x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < SERIES_SWITCH
    xs = x[small]
    out[small] = xs * sum(c * xs ** (2 * j) for j, c in enumerate(_G0_SERIES))
    xl = x[~small]
    with np.errstate(over="ignore"):
        sh2 = np.sinh(xl) ** 2
    # ((sinh^2 + x^2) cosh - 2 x sinh) / sinh^3, divided through by sinh^3
    out[~small] = (1 + xl**2 / sh2) / np.tanh(xl) - 2 * xl / sh2
    return out


def g0_planar_gaf(r):
    """Pair correlation of the zeros of the planar GAF (unit intensity)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise InvalidArgument("r must be non-negative")
    val = _g0_x(np.pi * r**2 / 2)
    return val if val.ndim else float(val)


def g0_ginibre(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise InvalidArgument("r must be non-negative")
    val = -np.expm1(-np.pi * r**2)
    return val if val.ndim else float(val)


def g0_poisson(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise InvalidArgument("r must be non-negative")
    val = np.ones_like(r)
    return val if val.ndim else float(val)


PAIR_CORRELATIONS = {"gaf": g0_planar_gaf, "ginibre": g0_ginibre, "poisson": g0_poisson}


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=50):
    """Adaptive Simpson quadrature of a scalar function on ``[a, b]``."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6 * (fa + 4 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15 * tol:
            return left + right + delta / 15
        return (recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2, depth - 1))

    if b == a:
        return 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


def K0_L0(kind, r, tol=1e-10):
    """Theoretical ``K(r) = 2 pi int_0^r t g0(t) dt`` and ``L = sqrt(K/pi)``."""
    if kind not in PAIR_CORRELATIONS:
        raise InvalidArgument(f"unknown kind {kind!r}")
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or np.any(r < 0) or np.any(np.diff(r) <= 0):
        raise InvalidArgument("r grid must be increasing and non-negative")
    if kind == "poisson":
        K = np.pi * r**2
    else:
        g0 = PAIR_CORRELATIONS[kind]
        integrand = lambda t: 2 * math.pi * t * float(g0(t))
        edges = np.concatenate([[0.0], r])
        # share the tolerance across segments in proportion to their length
        span = max(r[-1], 1e-300)
        pieces = [adaptive_simpson(integrand, lo, hi, tol * (hi - lo) / span)
                  for lo, hi in zip(edges[:-1], edges[1:])]
        K = np.cumsum(pieces)
    L = r.copy() if kind == "poisson" else np.sqrt(np.maximum(K, 0) / np.pi)
    return TheoryCurve(f"K0_{kind}", r, K), TheoryCurve(f"L0_{kind}", r, L)


def K0_ginibre_exact(r):
    """Closed-form Ginibre ``K``: ``pi r^2 - (1 - exp(-pi r^2))``."""
    r = np.asarray(r, dtype=float)
    return np.pi * r**2 + np.expm1(-np.pi * r**2)


def horizontal_density_S(y):
    """Continuous part ``S(y) = y / sqrt(1 - exp(-4 pi y^2))`` of the
    horizontal counting measure of the symmetric planar GAF zeros.

    ``S(0)`` is defined as the limit ``1 / (2 sqrt(pi))``.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise InvalidArgument("y must be non-negative")
    s = 4 * np.pi * y**2
    out = np.empty_like(y)
    small = s < SERIES_SWITCH
    ss = s[small]
    out[small] = sum(c * ss**j for j, c in enumerate(_S_SERIES)) / (2 * math.sqrt(math.pi))
    out[~small] = y[~small] / np.sqrt(-np.expm1(-s[~small]))
    return out if out.ndim else float(out)


def hole_constant():
    """Limit of ``r^-4 log P(no zero in the disk of radius r)`` for the planar GAF."""
    return -3 * math.e**2 / 4


def real_zero_density_symmetric():
    """Kac-Rice mean number of real zeros per unit length of the symmetric GAF.

    The covariance on the real axis is ``exp(-pi (x - y)^2 / 2)``, whose second
    spectral moment is ``pi``; the Rice formula gives ``sqrt(pi) / pi``.
    """
    return 1 / math.sqrt(math.pi)


def theory_curve(kind, r):
    """Tabulate a named reference curve (``g0_gaf``, ``g0_gin``, ``g0_poisson``,
    ``K0``/``L0`` for the GAF) on ``r``."""
    r = np.asarray(r, dtype=float)
    if kind == "g0_gaf":
        return TheoryCurve(kind, r, g0_planar_gaf(r))
    if kind in ("g0_gin", "g0_ginibre"):
        return TheoryCurve(kind, r, g0_ginibre(r))
    if kind == "g0_poisson":
        return TheoryCurve(kind, r, g0_poisson(r))
    if kind in ("K0", "L0"):
        K, L = K0_L0("gaf", r)
        return K if kind == "K0" else L
    if kind == "S":
        return TheoryCurve(kind, r, horizontal_density_S(r))
    raise InvalidArgument(f"unknown curve {kind!r}")
