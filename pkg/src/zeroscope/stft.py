"""Discrete Gaussian-window STFT, grid calibration and zero extraction.

Calibration
-----------
The window ``g_a(x) = (2 a^2)^{1/4} exp(-pi a^2 x^2)`` has spreads
``sigma_t = 1/(a sqrt(2 pi))`` and ``sigma_nu = 1/(2 pi sigma_t)``. Asking for
the same resolution in samples along time and frequency
(``sigma_t/dt = sigma_nu/dnu`` with ``dnu = fs/K``) forces
``sigma_t = sqrt(K/(2 pi)) dt``, i.e. ``fs = a sqrt(K)``. In sample units the
window is then ``(2 a^2)^{1/4} exp(-pi j^2 / K)`` whatever ``a`` is, and the
raster site ``(n, k)`` sits at the complex-plane point ``z = a u + i v / a``
with ``u = n dt`` and ``v = k dnu``, which simplifies to
``z = (n + i k) / sqrt(K)``.

Crop
----
Frames whose window hangs over either end of the signal are dropped
(``K/2 <= n <= N - K/2``). For a real signal the spectrum is Hermitian about
both ``k = 0`` and ``k = K/2``, so both lines behave like the real axis of a
symmetric GAF: zeros accumulate on them and are depleted nearby. ``ell =
ceil(sqrt(K))`` bins (one unit of ``Im z``) are removed next to each of them,
leaving ``ell <= k <= K/2 - ell``. The observation window is the union of the
raster cells of the retained sites, ``[(n0 - 1/2)/sqrt(K), (n1 + 1/2)/sqrt(K)]
x [(k0 - 1/2)/sqrt(K), (k1 + 1/2)/sqrt(K)]``, so its area is exactly the number
of retained sites divided by ``K``.

Only ``|STFT|^2`` is stored, so the unimodular phase factors of the STFT do not
affect anything downstream.
"""

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.fft

from .errors import InvalidArgument
from .ppstats import PointPattern, Rect
from .signals import Signal

MAGIC = b"SPGMv001"
_FRAME_CHUNK = 256


@dataclass(frozen=True)
class GridSpec:
    """Discrete STFT layout: ``N + 1`` frames, window of ``K`` samples.

    Either ``a`` or ``fs`` may be given; the other follows from
    ``fs = a sqrt(K)``. With neither, ``a = 1``.
    """

    n_samples: int
    window_len: int
    a: Optional[float] = None
    fs: Optional[float] = None

    def __post_init__(self):
        K, N = self.window_len, self.n_samples
        if int(K) != K or K < 16 or K % 2:
            raise InvalidArgument(f"window length K must be an even integer >= 16, got {K}")
        if int(N) != N or N < K:
            raise InvalidArgument(f"need N >= K, got N={N}, K={K}")
        a, fs = self.a, self.fs
        root = math.sqrt(K)
        if a is None and fs is None:
            a = 1.0
        if fs is None:
            fs = a * root
        elif a is None:
            a = fs / root
        elif not math.isclose(fs, a * root, rel_tol=1e-9):
            raise InvalidArgument(
                f"fs={fs} and a={a} violate the isotropy condition fs = a*sqrt(K)")
        if not (a > 0 and fs > 0):
            raise InvalidArgument("a and fs must be positive")
        object.__setattr__(self, "n_samples", int(N))
        object.__setattr__(self, "window_len", int(K))
        object.__setattr__(self, "a", float(a))
        object.__setattr__(self, "fs", float(fs))

    @classmethod
    def square(cls, K, a=None, fs=None):
        """The default layout ``N = 2K``."""
        return cls(2 * K, K, a=a, fs=fs)

    @property
    def N(self):
        return self.n_samples

    @property
    def K(self):
        return self.window_len

    @property
    def dt(self):
        return 1.0 / self.fs

    @property
    def dnu(self):
        return self.fs / self.K

    @property
    def sigma_t(self):
        return 1.0 / (self.a * math.sqrt(2 * math.pi))

    @property
    def sigma_nu(self):
        return 1.0 / (2 * math.pi * self.sigma_t)

    @property
    def n_freq(self):
        return self.K // 2 + 1

    @property
    def shape(self):
        return self.N + 1, self.n_freq

    @property
    def ell(self):
        return math.ceil(math.sqrt(self.K))

    @property
    def crop(self):
        """``(n0, n1, k0, k1)``, inclusive index bounds of the retained sites."""
        return self.K // 2, self.N - self.K // 2, self.ell, self.K // 2 - self.ell

    @property
    def crop_window(self):
        n0, n1, k0, k1 = self.crop
        s = math.sqrt(self.K)
        return Rect((n0 - 0.5) / s, (n1 + 0.5) / s, (k0 - 0.5) / s, (k1 + 0.5) / s)

    def window(self):
        """Sampled window at offsets ``j = -K/2 .. K/2 - 1`` (no renormalisation)."""
        j = np.arange(-self.K // 2, self.K // 2)
        return (2 * self.a**2) ** 0.25 * np.exp(-np.pi * j**2 / self.K)

    def to_json(self):
        return {"N": self.N, "K": self.K, "a": self.a, "fs": self.fs}


@dataclass(frozen=True)
class TFPoint:
    u: float
    v: float

    @property
    def z(self):
        return complex(self.u, self.v)


def sample_to_tf(n, k, grid: GridSpec):
    """Complex-plane coordinates of raster site ``(n, k)``."""
    if not (0 <= n <= grid.N and 0 <= k <= grid.K // 2):
        raise InvalidArgument(f"site ({n}, {k}) outside the raster {grid.shape}")
    u_phys, v_phys = n * grid.dt, k * grid.dnu
    return TFPoint(grid.a * u_phys, v_phys / grid.a)


def _frames(x, grid):
    K = grid.K
    xp = np.concatenate([np.zeros(K // 2, x.dtype), x[: grid.N + 1], np.zeros(K // 2, x.dtype)])
    return np.lib.stride_tricks.sliding_window_view(xp, K)


def _check_signal(signal, grid):
    if len(signal) < grid.N + 1:
        raise InvalidArgument(f"signal has {len(signal)} samples, grid needs {grid.N + 1}")
    if not math.isclose(signal.fs, grid.fs, rel_tol=1e-9):
        raise InvalidArgument(f"signal fs={signal.fs} differs from grid fs={grid.fs}")


def stft(signal: Signal, grid: GridSpec, phase=True):
    """Complex discrete STFT on the full ``(N+1, K/2+1)`` raster.

    ``X[n, k] = sum_m x_m g_a((m - n) dt) exp(-2i pi (k dnu)(m dt))`` with the
    sum restricted to the ``K`` samples ``n - K/2 <= m < n + K/2`` and samples
    outside ``0..N`` taken as zero. Samples past index ``N`` are ignored.
    ``phase=False`` drops the unimodular factor that ties the FFT output to
    absolute time; the modulus is unaffected.
    """
    _check_signal(signal, grid)
    K = grid.K
    frames = _frames(signal.samples, grid)
    w = grid.window()
    out = np.empty(grid.shape, dtype=complex)
    k = np.arange(grid.n_freq)
    # FFT index q = j + K/2 contributes (-1)^k; absolute time gives exp(-2i pi k n / K)
    roots = np.exp(-2j * np.pi * np.arange(K) / K)
    sign = np.where(k % 2, -1.0, 1.0)
    for start in range(0, grid.N + 1, _FRAME_CHUNK):
        stop = min(start + _FRAME_CHUNK, grid.N + 1)
        block = frames[start:stop] * w
        if signal.kind == "real":
            F = scipy.fft.rfft(block, axis=1)
        else:
            F = scipy.fft.fft(block, axis=1)[:, : grid.n_freq]
        if phase:
            n = np.arange(start, stop)[:, None]
            F = F * (sign * roots[(k * n) % K])
        out[start:stop] = F
    return out


@dataclass(frozen=True, eq=False)
class Spectrogram:
    values: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise InvalidArgument(f"raster shape {self.values.shape} != {self.grid.shape}")

    @property
    def crop(self):
        return self.grid.crop

    def cropped(self):
        n0, n1, k0, k1 = self.crop
        return self.values[n0 : n1 + 1, k0 : k1 + 1]

    def tf_axes(self):
        s = math.sqrt(self.grid.K)
        return np.arange(self.grid.N + 1) / s, np.arange(self.grid.n_freq) / s


def spectrogram(signal: Signal, grid: GridSpec):
    """Squared modulus of :func:`stft`."""
    X = stft(signal, grid, phase=False)
    return Spectrogram(X.real**2 + X.imag**2, grid)


def local_minima(values):
    """Interior sites strictly smaller than all eight neighbours.

    Sites tied with a neighbour are not minima; for continuous noise ties have
    probability zero.
    """
    S = np.asarray(values)
    if S.ndim != 2 or min(S.shape) < 3:
        raise InvalidArgument("raster must be at least 3x3")
    c = S[1:-1, 1:-1]
    m = np.ones(c.shape, dtype=bool)
    rows, cols = S.shape
    for di in (-1, 0, 1):
        for dk in (-1, 0, 1):
            if di or dk:
                m &= c < S[1 + di : rows - 1 + di, 1 + dk : cols - 1 + dk]
    n, k = np.nonzero(m)
    return n + 1, k + 1


_OFFSETS = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)])
_FIT = np.linalg.pinv(np.column_stack([
    np.ones(9), _OFFSETS[:, 0], _OFFSETS[:, 1],
    _OFFSETS[:, 0] ** 2, _OFFSETS[:, 0] * _OFFSETS[:, 1], _OFFSETS[:, 1] ** 2,
]))


def refine_minima(values, n, k):
    """Sub-bin minimum positions from a quadratic fit on each 3x3 neighbourhood.

    Near a simple zero ``|V|^2`` is locally a positive definite quadratic
    form, so the fitted vertex locates the zero inside its cell. Offsets are
    clipped to half a bin to keep each point in its own cell.
    """
    S = np.asarray(values)
    vals = np.stack([S[n + i, k + j] for i, j in _OFFSETS], axis=1)
    c = vals @ _FIT.T
    a, b, d = 2 * c[:, 3], c[:, 4], 2 * c[:, 5]
    det = a * d - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        dn = -(d * c[:, 1] - b * c[:, 2]) / det
        dk = -(a * c[:, 2] - b * c[:, 1]) / det
    ok = det > 0
    dn = np.where(ok, np.clip(dn, -0.5, 0.5), 0.0)
    dk = np.where(ok, np.clip(dk, -0.5, 0.5), 0.0)
    return n + dn, k + dk


def extract_zeros(spec: Spectrogram, refine=False):
    """Zeros of the spectrogram inside the crop, as a point pattern.

    A zero is a raster site strictly below its eight neighbours; no threshold
    on the value is applied. With ``refine=True`` positions are moved off the
    lattice by :func:`refine_minima`.
    """
    n0, n1, k0, k1 = spec.crop
    n, k = local_minima(spec.values)
    keep = (n >= n0) & (n <= n1) & (k >= k0) & (k <= k1)
    n, k = n[keep], k[keep]
    if refine:
        n, k = refine_minima(spec.values, n, k)
    s = math.sqrt(spec.grid.K)
    pts = np.column_stack([n / s, k / s]).astype(float)
    return PointPattern(pts, spec.grid.crop_window)


def count_zeros_full(spec: Spectrogram):
    """Number of strict local minima over the whole raster interior."""
    return len(local_minima(spec.values)[0])


def zeros_of_signal(signal: Signal, grid: GridSpec, refine=False):
    return extract_zeros(spectrogram(signal, grid), refine=refine)


def write_raster(path, spec: Spectrogram):
    n0, n1, k0, k1 = spec.crop
    header = dict(spec.grid.to_json(), crop=[n0, n1, k0, k1])
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(np.ascontiguousarray(spec.values, dtype="<f8").tobytes())


def read_raster(path):
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise InvalidArgument(f"{path}: not a spectrogram raster file")
        header = json.loads(fh.readline())
        data = np.frombuffer(fh.read(), dtype="<f8")
    grid = GridSpec(header["N"], header["K"], a=header["a"], fs=header["fs"])
    if list(grid.crop) != list(header["crop"]):
        raise InvalidArgument(f"{path}: crop {header['crop']} inconsistent with grid")
    return Spectrogram(data.reshape(grid.shape).astype(float), grid)


def hermite_oracle(k, grid: GridSpec):
    """Compare the spectrogram of a sampled Hermite function with its closed form.

    ``h_k`` (adapted to ``a``) is centred on the crop window in time and
    frequency. Returns ``(computed, exact, rel_err)`` on the crop, with
    ``rel_err = max |computed - exact| / max exact``.
    """
    from .hermite import hermite_stft_closed_form
    from .signals import hermite_signal

    n0, n1, k0, k1 = grid.crop
    n_c, k_c = (n0 + n1) // 2, (k0 + k1) // 2
    t_c, f_c = n_c * grid.dt, k_c * grid.dnu
    x = hermite_signal(k, grid.N + 1, grid.fs, grid.a, t_center=t_c, f_center=f_c)
    computed = spectrogram(x, grid).cropped()
    s = math.sqrt(grid.K)
    # z-plane offsets of the crop sites from the centre
    du = (np.arange(n0, n1 + 1) - n_c)[:, None] / s
    dv = (np.arange(k0, k1 + 1) - k_c)[None, :] / s
    exact = np.abs(hermite_stft_closed_form(k, du, dv)) ** 2
    rel_err = float(np.max(np.abs(computed - exact)) / np.max(exact))
    return computed, exact, rel_err
