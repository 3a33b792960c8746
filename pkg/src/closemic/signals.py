"""Test-signal generation and Leq-based level calibration.

All generators return mono, full-scale-normalized float buffers and are
deterministic for a fixed seed.  Levels are expressed in dB SPL through an
affine digital-to-acoustic mapping (``LevelMapping``): only level
*differences* matter downstream, so the absolute anchor is a convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, CalibrationError

DEFAULT_FULL_SCALE_SPL = 120.0

#: RMS that generators normalize to, leaving headroom for reverb summation.
GENERATOR_RMS = 0.25


@dataclass(frozen=True, eq=False)
class SignalBuffer:
    """Uniformly sampled mono waveform."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1:
            raise ArgumentError("SignalBuffer samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise ArgumentError("SignalBuffer samples must be finite")
        if not (isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0):
            raise ArgumentError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def scaled(self, gain: float) -> "SignalBuffer":
        return SignalBuffer(self.samples * gain, self.sample_rate)


@dataclass(frozen=True)
class LevelMapping:
    """dB SPL assigned to a digital RMS of 1.0 (0 dB FS)."""

    full_scale_spl: float = DEFAULT_FULL_SCALE_SPL

    def __post_init__(self):
        if not (math.isfinite(self.full_scale_spl) and self.full_scale_spl > 0):
            raise ArgumentError("full_scale_spl must be finite and positive")


def _check_rate(sample_rate) -> int:
    if not (isinstance(sample_rate, (int, np.integer)) and sample_rate >= 8000):
        raise ArgumentError(f"sample_rate must be an integer >= 8000 Hz, got {sample_rate!r}")
    return int(sample_rate)


def _normalize_rms(samples: np.ndarray, target_rms: float = GENERATOR_RMS) -> np.ndarray:
    rms = math.sqrt(float(np.mean(samples**2)))
    if rms == 0.0:
        raise ArgumentError("cannot normalize an all-zero signal")
    return samples * (target_rms / rms)


def gen_pink_noise(duration: float, sample_rate: int, seed: int) -> SignalBuffer:
    """Generate pink (1/f power) noise, RMS-normalized to 0.25 full scale.

    Spectral shaping is done in the frequency domain: white Gaussian noise
    is scaled by 1/sqrt(f) per bin, which gives an exact -3 dB/octave power
    slope across the whole band.
    """
    sample_rate = _check_rate(sample_rate)
    if not (duration > 0):
        raise ArgumentError(f"duration must be positive, got {duration!r}")
    n = round(duration * sample_rate)
    if n < 2:
        raise ArgumentError("duration too short for the given sample rate")

    rng = np.random.default_rng(seed)
    white = rng.standard_normal(n)
    spectrum = np.fft.rfft(white)
    k = np.arange(len(spectrum), dtype=np.float64)
    k[0] = 1.0  # DC handled below
    spectrum /= np.sqrt(k)
    spectrum[0] = 0.0
    pink = np.fft.irfft(spectrum, n)
    return SignalBuffer(_normalize_rms(pink), sample_rate)


def gen_riff(
    duration: float,
    sample_rate: int,
    fundamental: float = 196.0,
    pattern_period: float = 1.5,
    seed: int = 1,
    n_harmonics: int = 6,
) -> SignalBuffer:
    """Generate a repetitive tonal riff surrogate.

    One pattern period holds a few plucked notes (shared fundamental,
    decaying harmonics, attack/decay amplitude envelope); the period is
    tiled verbatim, so the pattern repeats sample-for-sample.
    """
    sample_rate = _check_rate(sample_rate)
    if not (duration > 0):
        raise ArgumentError(f"duration must be positive, got {duration!r}")
    if not (40.0 <= fundamental <= 2000.0):
        raise ArgumentError(f"fundamental must lie in [40, 2000] Hz, got {fundamental!r}")
    if not (0.1 <= pattern_period <= duration):
        raise ArgumentError(
            f"pattern_period must lie in [0.1 s, duration], got {pattern_period!r}"
        )
    if n_harmonics < 4:
        raise ArgumentError("need at least 4 harmonics for a tonal riff")

    n_total = round(duration * sample_rate)
    n_period = round(pattern_period * sample_rate)
    rng = np.random.default_rng(seed)

    # Steeply decaying harmonics concentrate the energy near the
    # fundamental, keeping the tonal peaks clearly separable from a
    # broadband interferer; mild jitter keeps different seeds distinct.
    orders = np.arange(1, n_harmonics + 1, dtype=np.float64)
    weights = orders**-3.0 * rng.uniform(0.9, 1.1, n_harmonics)
    weights[0] = max(weights[0], 1.0)

    n_notes = max(2, int(round(pattern_period / 0.375)))
    note_amps = rng.uniform(0.75, 1.0, n_notes)
    note_len = n_period / n_notes

    t = np.arange(n_period) / sample_rate
    carrier = np.zeros(n_period)
    for order, w in zip(orders, weights):
        carrier += w * np.sin(2.0 * math.pi * order * fundamental * t)

    # Gentle articulation: a 50 ms swell and a slow decay modulate the
    # notes without smearing the harmonic peaks.
    envelope = np.empty(n_period)
    attack = max(1, round(0.05 * sample_rate))
    for i in range(n_notes):
        start = round(i * note_len)
        stop = round((i + 1) * note_len) if i < n_notes - 1 else n_period
        local = np.arange(stop - start) / sample_rate
        tau = (stop - start) / sample_rate * float(rng.uniform(1.6, 2.4))
        env = note_amps[i] * np.exp(-local / tau)
        env *= np.minimum(np.arange(stop - start) / attack, 1.0)
        envelope[start:stop] = env

    period = envelope * carrier
    reps = -(-n_total // n_period)  # ceil
    samples = np.tile(period, reps)[:n_total]
    return SignalBuffer(_normalize_rms(samples), sample_rate)


def leq(signal: SignalBuffer, mapping: LevelMapping = LevelMapping()) -> float:
    """Equivalent continuous level of the whole buffer, in dB SPL.

    The averaging window is the entire buffer.  An all-zero buffer maps to
    the -inf sentinel.
    """
    if len(signal) == 0:
        raise ArgumentError("leq of an empty signal is undefined")
    mean_square = float(np.mean(signal.samples**2))
    if mean_square == 0.0:
        return -math.inf
    return mapping.full_scale_spl + 10.0 * math.log10(mean_square)


def calibrate_gain(
    signal: SignalBuffer, target: float, mapping: LevelMapping = LevelMapping()
) -> float:
    """Gain that brings ``signal`` to ``target`` dB SPL Leq."""
    current = leq(signal, mapping)
    if current == -math.inf:
        raise CalibrationError("cannot calibrate a zero-energy signal")
    return 10.0 ** ((target - current) / 20.0)
