"""Short-time Fourier analysis.

Frames are hopped over the buffer, windowed, and transformed with a
one-sided real FFT.  Trailing samples that do not fill a whole frame are
dropped, so the frame count is exactly ``1 + (N - frame) // hop``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .signals import SignalBuffer

_WINDOWS = ("hann", "rectangular")


@dataclass(frozen=True)
class StftParams:
    frame_length: int = 2048
    hop_length: int = 1024
    window: str = "hann"

    def __post_init__(self):
        if self.frame_length < 2 or self.frame_length & (self.frame_length - 1):
            raise ArgumentError(f"frame_length must be a power of two, got {self.frame_length}")
        if not (0 < self.hop_length <= self.frame_length):
            raise ArgumentError(
                f"hop_length must be in (0, frame_length], got {self.hop_length}"
            )
        if self.window not in _WINDOWS:
            raise ArgumentError(f"window must be one of {_WINDOWS}, got {self.window!r}")


def window_values(params: StftParams) -> np.ndarray:
    n = params.frame_length
    if params.window == "hann":
        # periodic Hann
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)
    return np.ones(n)


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """Complex time-frequency matrix indexed (frame, bin)."""

    bins: np.ndarray
    params: StftParams
    sample_rate: int

    @property
    def n_frames(self) -> int:
        return self.bins.shape[0]

    @property
    def n_bins(self) -> int:
        return self.bins.shape[1]

    def bin_frequency(self, k: int) -> float:
        return k * self.sample_rate / self.params.frame_length


def stft(signal: SignalBuffer, params: StftParams = StftParams()) -> Spectrogram:
    n = len(signal)
    if n < params.frame_length:
        raise ArgumentError(
            f"signal ({n} samples) shorter than one frame ({params.frame_length})"
        )
    frames = np.lib.stride_tricks.sliding_window_view(signal.samples, params.frame_length)
    frames = frames[:: params.hop_length]
    windowed = frames * window_values(params)
    return Spectrogram(np.fft.rfft(windowed, axis=1), params, signal.sample_rate)


def magnitude(spec: Spectrogram) -> np.ndarray:
    """Elementwise modulus of the spectrogram."""
    return np.abs(spec.bins)


def spectrogram_to_csv(spec: Spectrogram, path) -> None:
    """Debug dump: one line per (frame, bin) with real and imaginary parts."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("frame,bin,real,imag\n")
        for m in range(spec.n_frames):
            for k in range(spec.n_bins):
                z = spec.bins[m, k]
                fh.write(f"{m},{k},{z.real!r},{z.imag!r}\n")
