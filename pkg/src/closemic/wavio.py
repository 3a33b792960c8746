"""Mono 16-bit PCM WAV import/export.

Quantization is plain rounding (no dither) so exports are bit-deterministic.
"""

from __future__ import annotations

import numpy as np
from scipy.io import wavfile

from .errors import ArgumentError
from .signals import SignalBuffer

_PCM_FULL_SCALE = 32767.0


def write_wav(path, signal: SignalBuffer) -> None:
    """Write a full-scale-normalized buffer as mono 16-bit PCM."""
    peak = float(np.max(np.abs(signal.samples))) if len(signal) else 0.0
    if peak > 1.0:
        raise ArgumentError(f"samples exceed full scale (peak {peak:.6f}); refusing to clip")
    pcm = np.rint(signal.samples * _PCM_FULL_SCALE).astype(np.int16)
    wavfile.write(path, signal.sample_rate, pcm)


def read_wav(path) -> SignalBuffer:
    """Read a mono 16-bit PCM WAV back into a float buffer."""
    rate, data = wavfile.read(path)
    if data.ndim != 1:
        raise ArgumentError(f"{path}: expected mono audio, got {data.ndim} channels")
    if data.dtype != np.int16:
        raise ArgumentError(f"{path}: expected 16-bit PCM, got dtype {data.dtype}")
    return SignalBuffer(data.astype(np.float64) / _PCM_FULL_SCALE, int(rate))
