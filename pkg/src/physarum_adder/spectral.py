"""Magnitude spectra and dominant-frequency extraction for flux and voltage series.

Normalisation: for a series of ``n`` samples transformed with ``nfft`` points,
``magnitudes[k] = |X[k]| / nfft`` where ``X`` is the real FFT of the
mean-subtracted, windowed series.  With one-sided weights ``c[k]`` (1 for DC
and, for even ``nfft``, the Nyquist bin; 2 elsewhere) the identity

    nfft * sum(c * magnitudes**2) == sum((windowed series)**2)

holds exactly up to rounding; :func:`spectral_energy` returns the left side.
"""
import csv
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, InvalidArgument

MIN_SAMPLES = 16


@dataclass(frozen=True)
class Spectrum:
    frequencies: np.ndarray
    magnitudes: np.ndarray
    nfft: int
    time_unit: str = "step"

    @property
    def bin_width(self):
        return float(self.frequencies[1] - self.frequencies[0])

    def __len__(self):
        return len(self.frequencies)


@dataclass(frozen=True)
class DominantFrequency:
    frequency: float
    magnitude: float
    bin_width: float


def _window(name, n):
    if name == "hann":
        # periodic Hann: a bin-aligned sinusoid keeps its peak on the exact bin
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)
    if name in ("rect", "rectangular", "boxcar", None):
        return np.ones(n)
    raise InvalidArgument(f"unknown window {name!r}")


def periodogram(series, dt=1.0, window="hann", pad=1, time_unit="step"):
    """Magnitude spectrum of ``series`` sampled every ``dt`` time units.

    ``pad`` zero-pads the windowed series to ``pad * len(series)`` points,
    which interpolates the spectrum without adding resolution.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < MIN_SAMPLES:
        raise InsufficientData(f"need at least {MIN_SAMPLES} samples, got {x.size}")
    if dt <= 0:
        raise InvalidArgument("dt must be positive")
    if pad < 1 or int(pad) != pad:
        raise InvalidArgument("pad must be a positive integer")
    n = x.size
    xw = (x - x.mean()) * _window(window, n)
    nfft = int(pad) * n
    mags = np.abs(np.fft.rfft(xw, n=nfft)) / nfft
    freqs = np.fft.rfftfreq(nfft, d=dt)
    return Spectrum(freqs, mags, nfft, time_unit)


def windowed_energy(series, window="hann"):
    x = np.asarray(series, dtype=float)
    xw = (x - x.mean()) * _window(window, x.size)
    return float(np.sum(xw * xw))


def spectral_energy(spec):
    c = np.full(spec.magnitudes.shape, 2.0)
    c[0] = 1.0
    if spec.nfft % 2 == 0:
        c[-1] = 1.0
    return float(spec.nfft * np.sum(c * spec.magnitudes ** 2))


def dominant_frequency(spec, min_frequency=None):
    """Largest-magnitude bin at or above ``min_frequency``.

    The default cutoff is two bin widths, which keeps DC and slow drift out.
    Equal magnitudes resolve to the lowest frequency.
    """
    if min_frequency is None:
        min_frequency = 2.0 * spec.bin_width
    # tolerate rounding in k/(N*dt) when the cutoff sits exactly on a bin
    ok = spec.frequencies >= min_frequency * (1.0 - 1e-12)
    ok &= spec.frequencies > 0
    if np.count_nonzero(ok) < 2:
        raise InsufficientData(
            f"fewer than 2 bins at or above {min_frequency:g} per {spec.time_unit}")
    idx = np.flatnonzero(ok)
    k = idx[np.argmax(spec.magnitudes[idx])]
    return DominantFrequency(float(spec.frequencies[k]), float(spec.magnitudes[k]), spec.bin_width)


def peak_to_median(spec, min_frequency=None):
    """Dominant non-DC magnitude divided by the median non-DC magnitude."""
    dom = dominant_frequency(spec, min_frequency)
    med = float(np.median(spec.magnitudes[1:]))
    return dom.magnitude / med if med > 0 else float("inf")


def write_spectrum_csv(path, spec):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["frequency", "magnitude"])
        for f, m in zip(spec.frequencies, spec.magnitudes):
            w.writerow([repr(float(f)), repr(float(m))])
