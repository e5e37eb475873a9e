"""Detecting signals in white noise from the zeros of Gaussian spectrograms."""

from .detect import (EnvelopeTestResult, PowerEstimate, TestConfig, clopper_pearson,
                     envelope_curves, envelope_test, estimate_power, test_statistic)
from .errors import (InsufficientPoints, InvalidArgument, OutOfSafeRegion, Unsupported,
                     ZeroFindingIncomplete, ZeroscopeError)
from .gaf import GafSample, eval_scaled, find_zeros, real_zeros, sample_gaf
from .ppstats import Disk, FunctionalCurve, PointPattern, Rect
from .signals import ChirpSpec, Signal, linear_chirp, mix_snr, white_noise
from .stft import GridSpec, Spectrogram, extract_zeros, spectrogram, zeros_of_signal

__version__ = "0.1.0"
