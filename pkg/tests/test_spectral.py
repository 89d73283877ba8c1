import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from physarum_adder.errors import InsufficientData, InvalidArgument
from physarum_adder.spectral import (Spectrum, dominant_frequency, peak_to_median, periodogram,
                                     spectral_energy, windowed_energy, write_spectrum_csv)


def sine(f, n, dt=1.0, amp=1.0, phase=0.3):
    t = np.arange(n) * dt
    return amp * np.sin(2 * np.pi * f * t + phase)


def test_too_short():
    with pytest.raises(InsufficientData):
        periodogram(np.ones(15))
    periodogram(np.arange(16.0))


def test_bad_args():
    with pytest.raises(InvalidArgument):
        periodogram(np.ones(32), dt=0)
    with pytest.raises(InvalidArgument):
        periodogram(np.ones(32), window="kaiser")
    with pytest.raises(InvalidArgument):
        periodogram(np.ones(32), pad=1.5)


def test_constant_series_is_flat():
    spec = periodogram(np.full(100, 7.0))
    assert np.all(spec.magnitudes[1:] < 1e-9 * 7.0)


def test_bins():
    spec = periodogram(np.random.default_rng(0).random(2000), dt=5.0)
    assert len(spec) == 1001
    assert spec.frequencies[0] == 0.0
    assert spec.frequencies[-1] == pytest.approx(0.1)
    assert spec.bin_width == pytest.approx(1 / 10000)
    assert np.all(np.diff(spec.frequencies) > 0)


def test_sine_recovery_step_units():
    spec = periodogram(sine(0.01, 2000, dt=5.0), dt=5.0)
    dom = dominant_frequency(spec)
    assert abs(dom.frequency - 0.01) <= spec.bin_width


def test_two_sines_stronger_wins():
    x = sine(0.01, 2000, 5.0, amp=3.0) + sine(0.03, 2000, 5.0, amp=1.0)
    assert dominant_frequency(periodogram(x, 5.0)).frequency == pytest.approx(0.01)


@given(st.integers(16, 600), st.data())
def test_bin_aligned_exact(n, data):
    k = data.draw(st.integers(2, n // 2 - 1)) if n // 2 - 1 >= 2 else 2
    if k >= n // 2:
        return
    dt = data.draw(st.sampled_from([1.0, 5.0, 0.25]))
    f = k / (n * dt)
    for window in ("hann", "rect"):
        spec = periodogram(sine(f, n, dt, phase=data.draw(st.floats(0, 6.28))), dt, window=window)
        assert dominant_frequency(spec).frequency == spec.frequencies[k]


@settings(max_examples=60)
@given(st.integers(64, 800), st.floats(0.05, 0.45))
def test_off_bin_within_one_bin(n, rel):
    # rel is cycles/sample; keep away from the excluded low bins
    f = max(rel, 3.0 / n)
    spec = periodogram(sine(f, n), 1.0)
    assert abs(dominant_frequency(spec).frequency - f) <= spec.bin_width


@given(st.floats(1e-3, 1e3))
def test_scale_invariance(c):
    x = np.random.default_rng(3).standard_normal(256) + sine(0.1, 256, amp=2.0)
    a = dominant_frequency(periodogram(x)).frequency
    b = dominant_frequency(periodogram(c * x)).frequency
    assert a == b


@given(st.integers(16, 500), st.sampled_from(["hann", "rect"]), st.integers(1, 4))
def test_energy_identity(n, window, pad):
    x = np.random.default_rng(n).standard_normal(n)
    spec = periodogram(x, window=window, pad=pad)
    e_t = windowed_energy(x, window)
    e_f = spectral_energy(spec)
    assert e_f <= e_t * (1 + 1e-6)
    assert e_f == pytest.approx(e_t, rel=1e-9)


def test_single_bin_spectrum():
    f = np.arange(10) * 0.1
    m = np.zeros(10)
    m[6] = 1.0
    assert dominant_frequency(Spectrum(f, m, 18)).frequency == pytest.approx(0.6)


def test_tie_lowest_frequency():
    f = np.arange(10) * 0.1
    m = np.zeros(10)
    m[4] = m[7] = 2.0
    assert dominant_frequency(Spectrum(f, m, 18)).frequency == pytest.approx(0.4)


def test_min_frequency_cutoff():
    f = np.arange(10) * 0.1
    m = np.linspace(1, 0, 10)
    assert dominant_frequency(Spectrum(f, m, 18)).frequency == pytest.approx(0.2)
    assert dominant_frequency(Spectrum(f, m, 18), 0.5).frequency == pytest.approx(0.5)
    with pytest.raises(InsufficientData):
        dominant_frequency(Spectrum(f, m, 18), 0.85)


def test_padding_interpolates():
    x = sine(0.0123, 400)
    s1 = periodogram(x)
    s4 = periodogram(x, pad=4)
    assert s4.nfft == 1600
    assert s4.bin_width == pytest.approx(s1.bin_width / 4)
    assert abs(dominant_frequency(s4).frequency - 0.0123) <= s4.bin_width


def test_peak_to_median():
    x = sine(0.05, 1000) + 0.01 * np.random.default_rng(1).standard_normal(1000)
    assert peak_to_median(periodogram(x)) > 5


def test_csv(tmp_path):
    spec = periodogram(sine(0.1, 64))
    p = tmp_path / "s.csv"
    write_spectrum_csv(p, spec)
    lines = p.read_text().splitlines()
    assert lines[0] == "frequency,magnitude"
    assert len(lines) == len(spec) + 1
    back = np.loadtxt(p, delimiter=",", skiprows=1)
    assert np.array_equal(back[:, 1], spec.magnitudes)
