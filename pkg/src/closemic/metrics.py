"""Binary time-frequency masking and signal-to-interference ratio.

The mask assigns a bin to the source whenever the source magnitude is at
least the interferer magnitude (ties go to the source).  SIR is the dB
ratio of the squared Frobenius norms of the masked magnitude matrices.

``sir_oracle`` re-derives the same quantity with naive per-bin loops and
shares no code path with ``sir``; it exists purely as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, UndefinedSirError
from .signals import SignalBuffer
from .spectral import StftParams, magnitude, stft


@dataclass(frozen=True)
class SirResult:
    sir_db: float  # may be +inf when the masked noise energy is zero
    masked_source_energy: float
    masked_noise_energy: float
    mask_density: float


def _check_pair(source_mag, noise_mag):
    s = np.asarray(source_mag, dtype=np.float64)
    n = np.asarray(noise_mag, dtype=np.float64)
    if s.shape != n.shape:
        raise ArgumentError(f"magnitude shapes differ: {s.shape} vs {n.shape}")
    return s, n


def binary_mask(source_mag, noise_mag) -> np.ndarray:
    """0/1 matrix: 1 where the source magnitude is >= the noise magnitude."""
    s, n = _check_pair(source_mag, noise_mag)
    return (s >= n).astype(np.uint8)


def sir(source_mag, noise_mag) -> SirResult:
    s, n = _check_pair(source_mag, noise_mag)
    if not np.any(s):
        raise UndefinedSirError("source magnitude is identically zero")
    mask = s >= n
    source_energy = float(np.sum((s[mask]) ** 2))
    noise_energy = float(np.sum((n[mask]) ** 2))
    if noise_energy == 0.0:
        sir_db = math.inf
    else:
        sir_db = 10.0 * math.log10(source_energy / noise_energy)
    return SirResult(sir_db, source_energy, noise_energy, float(np.mean(mask)))


def sir_oracle(source_mag, noise_mag) -> SirResult:
    """Independent brute-force evaluation of the mask and energy ratio."""
    rows = len(source_mag)
    if rows != len(noise_mag):
        raise ArgumentError("magnitude shapes differ")
    source_energy = 0.0
    noise_energy = 0.0
    ones = 0
    bins = 0
    any_source = False
    for row_s, row_n in zip(source_mag, noise_mag):
        if len(row_s) != len(row_n):
            raise ArgumentError("magnitude shapes differ")
        for s_val, n_val in zip(row_s, row_n):
            s_val = float(s_val)
            n_val = float(n_val)
            bins += 1
            if s_val != 0.0:
                any_source = True
            if s_val >= n_val:
                ones += 1
                source_energy += s_val * s_val
                noise_energy += n_val * n_val
    if not any_source:
        raise UndefinedSirError("source magnitude is identically zero")
    if noise_energy == 0.0:
        sir_db = math.inf
    else:
        sir_db = 10.0 * math.log10(source_energy / noise_energy)
    return SirResult(sir_db, source_energy, noise_energy, ones / bins)


def evaluate_pair(
    source_only: SignalBuffer,
    noise_only: SignalBuffer,
    params: StftParams = StftParams(),
) -> SirResult:
    """SIR of a (source-only, noise-only) capture pair."""
    if len(source_only) != len(noise_only):
        raise ArgumentError("capture pair must have equal lengths")
    if source_only.sample_rate != noise_only.sample_rate:
        raise ArgumentError("capture pair must share a sample rate")
    return sir(
        magnitude(stft(source_only, params)),
        magnitude(stft(noise_only, params)),
    )
