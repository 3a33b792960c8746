import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.signal import welch

from closemic.errors import ArgumentError, CalibrationError
from closemic.signals import (
    LevelMapping,
    SignalBuffer,
    calibrate_gain,
    gen_pink_noise,
    gen_riff,
    leq,
)
from closemic.wavio import read_wav, write_wav

SR = 44100


class TestPinkNoise:
    def test_length(self):
        buf = gen_pink_noise(15, SR, seed=7)
        assert len(buf) == 661_500

    def test_deterministic(self):
        a = gen_pink_noise(15, SR, seed=7)
        b = gen_pink_noise(15, SR, seed=7)
        assert np.array_equal(a.samples, b.samples)

    def test_rms_normalized(self):
        buf = gen_pink_noise(5, SR, seed=3)
        assert math.sqrt(np.mean(buf.samples**2)) == pytest.approx(0.25, rel=1e-9)

    def test_octave_band_power_ratio(self):
        # Welch-averaged periodogram oracle: power density around 1 kHz
        # should sit ~3 dB above the density around 2 kHz.
        buf = gen_pink_noise(15, SR, seed=7)
        freqs, psd = welch(buf.samples, fs=SR, nperseg=2048)
        band = lambda f0: np.mean(psd[(freqs > f0 / 2**0.25) & (freqs < f0 * 2**0.25)])
        ratio_db = 10 * np.log10(band(1000.0) / band(2000.0))
        assert ratio_db == pytest.approx(3.0, abs=1.0)
        assert len(buf) // 2048 >= 256  # enough frames for the average

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_slope_seed_independent(self, seed):
        buf = gen_pink_noise(10, SR, seed=seed)
        freqs, psd = welch(buf.samples, fs=SR, nperseg=4096)
        keep = (freqs >= 100) & (freqs <= 10_000)
        slope = np.polyfit(np.log2(freqs[keep]), 10 * np.log10(psd[keep]), 1)[0]
        assert slope == pytest.approx(-3.0, abs=1.0)

    def test_bad_arguments(self):
        with pytest.raises(ArgumentError):
            gen_pink_noise(0, SR, seed=1)
        with pytest.raises(ArgumentError):
            gen_pink_noise(-1.0, SR, seed=1)
        with pytest.raises(ArgumentError):
            gen_pink_noise(1.0, 4000, seed=1)


class TestRiff:
    def test_pattern_repeats_exactly(self):
        buf = gen_riff(15, SR, 196.0, 1.5, seed=1)
        period = round(1.5 * SR)
        assert np.array_equal(buf.samples[:period], buf.samples[period : 2 * period])

    def test_deterministic(self):
        a = gen_riff(4, SR, 196.0, 1.0, seed=9)
        b = gen_riff(4, SR, 196.0, 1.0, seed=9)
        assert np.array_equal(a.samples, b.samples)

    def test_dominant_peak_is_harmonic(self):
        # FFT-peak oracle: the strongest bin of any analysis frame must sit
        # within one bin of a multiple of the fundamental.
        buf = gen_riff(6, SR, 196.0, 1.5, seed=1)
        n_fft = 4096
        bin_hz = SR / n_fft
        window = np.hanning(n_fft)
        for start in range(0, len(buf) - n_fft, n_fft // 2):
            frame = buf.samples[start : start + n_fft] * window
            spectrum = np.abs(np.fft.rfft(frame))
            peak_hz = np.argmax(spectrum) * bin_hz
            nearest = round(peak_hz / 196.0) * 196.0
            assert nearest > 0
            assert abs(peak_hz - nearest) <= bin_hz

    def test_rms_normalized(self):
        buf = gen_riff(3, SR, 196.0, 0.5, seed=2)
        assert math.sqrt(np.mean(buf.samples**2)) == pytest.approx(0.25, rel=1e-9)

    def test_bad_arguments(self):
        with pytest.raises(ArgumentError):
            gen_riff(0, SR, 196.0, 1.5, seed=1)
        with pytest.raises(ArgumentError):
            gen_riff(5, SR, 20.0, 1.5, seed=1)
        with pytest.raises(ArgumentError):
            gen_riff(5, SR, 196.0, 0.05, seed=1)
        with pytest.raises(ArgumentError):
            gen_riff(5, SR, 196.0, 6.0, seed=1)  # period > duration


class TestLeq:
    def test_constant_full_scale(self):
        buf = SignalBuffer(np.ones(1000), SR)
        assert leq(buf, LevelMapping(120.0)) == pytest.approx(120.0, abs=1e-12)

    def test_full_scale_sine(self):
        t = np.arange(SR) / SR
        buf = SignalBuffer(np.sin(2 * np.pi * 441.0 * t), SR)
        assert leq(buf, LevelMapping(120.0)) == pytest.approx(116.99, abs=0.01)

    def test_zero_signal_sentinel(self):
        assert leq(SignalBuffer(np.zeros(100), SR)) == -math.inf

    def test_empty_signal(self):
        with pytest.raises(ArgumentError):
            leq(SignalBuffer(np.zeros(0), SR))

    @given(gain_db=st.floats(-40, 40), seed=st.integers(0, 50))
    @settings(max_examples=30, deadline=None)
    def test_gain_shifts_leq_exactly(self, gain_db, seed):
        buf = gen_pink_noise(0.05, SR, seed=seed)
        gain = 10 ** (gain_db / 20)
        shift = leq(buf.scaled(gain)) - leq(buf)
        assert shift == pytest.approx(20 * math.log10(gain), abs=1e-9)

    def test_3db_doubles_energy(self):
        buf = gen_pink_noise(0.1, SR, seed=0)
        gain = calibrate_gain(buf, leq(buf) + 3.0)
        ratio = np.mean(buf.scaled(gain).samples**2) / np.mean(buf.samples**2)
        assert ratio == pytest.approx(10 ** 0.3, rel=1e-9)


class TestCalibrateGain:
    def test_step_down_3db(self):
        buf = gen_pink_noise(0.2, SR, seed=1)
        mapping = LevelMapping()
        gain0 = calibrate_gain(buf, 100.0, mapping)
        at_100 = buf.scaled(gain0)
        assert calibrate_gain(at_100, 97.0, mapping) == pytest.approx(0.70795, abs=1e-5)

    def test_step_up_6db(self):
        buf = gen_pink_noise(0.2, SR, seed=2)
        mapping = LevelMapping()
        at_94 = buf.scaled(calibrate_gain(buf, 94.0, mapping))
        assert calibrate_gain(at_94, 100.0, mapping) == pytest.approx(1.99526, abs=1e-5)

    def test_identity(self):
        buf = gen_pink_noise(0.1, SR, seed=3)
        assert calibrate_gain(buf, leq(buf)) == pytest.approx(1.0, abs=1e-12)

    def test_round_trip(self):
        buf = gen_riff(1, SR, 110.0, 0.5, seed=4)
        for target in (80.0, 94.0, 117.0):
            gain = calibrate_gain(buf, target)
            assert leq(buf.scaled(gain)) == pytest.approx(target, abs=1e-6)

    def test_zero_energy(self):
        with pytest.raises(CalibrationError):
            calibrate_gain(SignalBuffer(np.zeros(64), SR), 100.0)


class TestWav:
    def test_round_trip(self, tmp_path):
        buf = gen_riff(0.5, SR, 196.0, 0.25, seed=5)
        path = tmp_path / "riff.wav"
        write_wav(path, buf)
        back = read_wav(path)
        assert back.sample_rate == SR
        assert np.max(np.abs(back.samples - buf.samples)) < 1.0 / 32767

    def test_write_is_deterministic(self, tmp_path):
        buf = gen_pink_noise(0.2, SR, seed=6)
        write_wav(tmp_path / "a.wav", buf)
        write_wav(tmp_path / "b.wav", buf)
        assert (tmp_path / "a.wav").read_bytes() == (tmp_path / "b.wav").read_bytes()

    def test_rejects_clipping(self, tmp_path):
        buf = SignalBuffer(np.array([0.0, 1.5, 0.0]), SR)
        with pytest.raises(ArgumentError):
            write_wav(tmp_path / "clip.wav", buf)
