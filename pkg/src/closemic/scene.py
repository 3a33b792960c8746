"""Acoustic scene rendering: directivity, propagation, diffuse reverb.

A scene holds one target and one noise source, one microphone, and a
parametric room.  Rendering is linear and deterministic: the direct path
follows the inverse-distance law weighted by the mic's polar pattern; the
reverberant path is a synthetic exponentially decaying diffuse tail whose
energy is pinned to the critical-distance relation and reduced by the
pattern's directivity factor.

Level calibration mimics a sound level meter at the microphone position:
an omnidirectional probe of the total field (direct + reverberant), taken
with each source alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import fftconvolve

from .errors import ArgumentError, CalibrationError, ContractError, SingularityError
from .signals import LevelMapping, SignalBuffer, calibrate_gain

MIN_DISTANCE_M = 0.01
DEFAULT_REF_DISTANCE_M = 1.0

#: Sabine-model critical distance coefficient: r_c = 0.057 * sqrt(V / RT).
_CRITICAL_COEFF = 0.057

#: ln(10^3): amplitude decay constant giving -60 dB at t = rt60.
_DECAY = 6.91


class Directivity(enum.Enum):
    OMNI = "omni"
    CARDIOID = "cardioid"


class Role(enum.Enum):
    TARGET = "target"
    NOISE = "noise"


def directivity_gain(directivity: Directivity, incidence_angle_deg: float) -> float:
    """Polar-pattern amplitude gain at the given incidence angle."""
    if directivity is Directivity.OMNI:
        return 1.0
    return (1.0 + math.cos(math.radians(incidence_angle_deg))) / 2.0


def directivity_factor(directivity: Directivity) -> float:
    """On-axis to diffuse-field power sensitivity ratio (1 omni, 3 cardioid)."""
    return 1.0 if directivity is Directivity.OMNI else 3.0


@dataclass(frozen=True)
class SourceSpec:
    signal: SignalBuffer
    position: tuple[float, float]
    target_spl: float
    role: Role


@dataclass(frozen=True)
class MicSpec:
    position: tuple[float, float]
    axis_angle_deg: float
    directivity: Directivity


@dataclass(frozen=True)
class RoomSpec:
    rt60: float
    volume: float
    reverb_seed: int

    def __post_init__(self):
        if self.rt60 < 0:
            raise ArgumentError(f"rt60 must be >= 0, got {self.rt60!r}")
        if not (self.volume > 0):
            raise ArgumentError(f"volume must be positive, got {self.volume!r}")

    @property
    def critical_distance(self) -> float:
        if self.rt60 == 0:
            return math.inf
        return _CRITICAL_COEFF * math.sqrt(self.volume / self.rt60)


@dataclass(frozen=True)
class SceneConfig:
    target: SourceSpec
    noise: SourceSpec
    mic: MicSpec
    room: RoomSpec
    sample_rate: int
    ref_distance: float = DEFAULT_REF_DISTANCE_M

    def source(self, which: Role) -> SourceSpec:
        return self.target if which is Role.TARGET else self.noise


def propagate_direct(
    signal: SignalBuffer, distance: float, ref_distance: float = DEFAULT_REF_DISTANCE_M
) -> SignalBuffer:
    """Free-field inverse-distance attenuation relative to ``ref_distance``."""
    if distance < MIN_DISTANCE_M:
        raise SingularityError(f"distance {distance!r} m is below {MIN_DISTANCE_M} m")
    if not (ref_distance > 0):
        raise ArgumentError(f"ref_distance must be positive, got {ref_distance!r}")
    return signal.scaled(ref_distance / distance)


def render_reverb_tail(
    signal: SignalBuffer,
    room: RoomSpec,
    source_to_mic_distance: float,
    directivity: Directivity,
    seed=None,
    ref_distance: float = DEFAULT_REF_DISTANCE_M,
) -> SignalBuffer:
    """Diffuse reverberant component of the capture.

    The dry signal is convolved with an exponentially decaying noise
    impulse response, then the tail energy is scaled so that the
    direct-to-reverberant energy ratio at ``source_to_mic_distance``
    equals (r_c / r)^2, divided further by the directivity factor to
    model diffuse-field rejection.
    """
    if room.rt60 <= 0:
        raise ContractError("render_reverb_tail requires rt60 > 0; skip in free field")
    if source_to_mic_distance < MIN_DISTANCE_M:
        raise SingularityError(f"distance {source_to_mic_distance!r} m is below {MIN_DISTANCE_M} m")

    sr = signal.sample_rate
    n_ir = max(2, round(room.rt60 * sr))
    rng = np.random.default_rng(room.reverb_seed if seed is None else seed)
    t = np.arange(n_ir) / sr
    ir = rng.standard_normal(n_ir) * np.exp(-_DECAY * t / room.rt60)
    tail = fftconvolve(signal.samples, ir)[: len(signal)]

    r = source_to_mic_distance
    r_c = room.critical_distance
    direct_energy = float(np.sum(signal.samples**2)) * (ref_distance / r) ** 2
    target_energy = direct_energy * (r / r_c) ** 2 / directivity_factor(directivity)
    actual_energy = float(np.sum(tail**2))
    if actual_energy == 0.0:
        return SignalBuffer(tail, sr)
    return SignalBuffer(tail * math.sqrt(target_energy / actual_energy), sr)


def _wrap_deg(angle: float) -> float:
    """Wrap to (-180, 180]."""
    wrapped = (angle + 180.0) % 360.0 - 180.0
    return 180.0 if wrapped == -180.0 else wrapped


def incidence_angles(scene: SceneConfig) -> tuple[float, float]:
    """Incidence angles (degrees) of the target and noise on the mic axis.

    The mic axis starts aligned with the mic-to-target direction and is
    rotated by ``axis_angle_deg`` away from the noise source, so a positive
    axis angle increases both incidence angles by the same amount.
    """
    mic = np.asarray(scene.mic.position, dtype=np.float64)
    to_target = np.asarray(scene.target.position, dtype=np.float64) - mic
    to_noise = np.asarray(scene.noise.position, dtype=np.float64) - mic
    if not np.any(to_target):
        raise ArgumentError("target position coincides with the microphone")
    if not np.any(to_noise):
        raise ArgumentError("noise position coincides with the microphone")

    base = math.degrees(math.atan2(to_target[1], to_target[0]))
    noise_bearing = math.degrees(math.atan2(to_noise[1], to_noise[0]))
    beta = _wrap_deg(noise_bearing - base)
    away = 1.0 if beta >= 0 else -1.0
    axis = base - away * scene.mic.axis_angle_deg
    target_inc = abs(_wrap_deg(base - axis))
    noise_inc = abs(_wrap_deg(noise_bearing - axis))
    return target_inc, noise_inc


def _distance(scene: SceneConfig, which: Role) -> float:
    src = np.asarray(scene.source(which).position, dtype=np.float64)
    mic = np.asarray(scene.mic.position, dtype=np.float64)
    return float(np.linalg.norm(src - mic))


def _tail_seed(scene: SceneConfig, which: Role):
    # Per-role derived stream: concurrent render order cannot change results.
    return np.random.SeedSequence([scene.room.reverb_seed, 0 if which is Role.TARGET else 1])


def render_capture(scene: SceneConfig, which: Role, gain: float = 1.0) -> SignalBuffer:
    """Signal captured by the scene's microphone from one source alone."""
    src = scene.source(which)
    r = _distance(scene, which)
    target_inc, noise_inc = incidence_angles(scene)
    inc = target_inc if which is Role.TARGET else noise_inc

    g_dir = directivity_gain(scene.mic.directivity, inc)
    out = g_dir * propagate_direct(src.signal, r, scene.ref_distance).samples
    if scene.room.rt60 > 0:
        tail = render_reverb_tail(
            src.signal,
            scene.room,
            r,
            scene.mic.directivity,
            seed=_tail_seed(scene, which),
            ref_distance=scene.ref_distance,
        )
        out = out + tail.samples
    return SignalBuffer(out * gain, scene.sample_rate)


def probe_field(scene: SceneConfig, which: Role) -> SignalBuffer:
    """Total field at the mic position seen by an omnidirectional probe.

    This is what the level meter measures during calibration: direct plus
    reverberant energy, independent of the recording mic's pattern.
    """
    src = scene.source(which)
    r = _distance(scene, which)
    out = propagate_direct(src.signal, r, scene.ref_distance).samples
    if scene.room.rt60 > 0:
        tail = render_reverb_tail(
            src.signal,
            scene.room,
            r,
            Directivity.OMNI,
            seed=_tail_seed(scene, which),
            ref_distance=scene.ref_distance,
        )
        out = out + tail.samples
    return SignalBuffer(out, scene.sample_rate)


def calibrate_source(
    scene: SceneConfig, which: Role, mapping: LevelMapping = LevelMapping()
) -> float:
    """Gain bringing the probed field of one source to its target SPL."""
    src = scene.source(which)
    if not np.any(src.signal.samples):
        raise CalibrationError(f"{which.value} source has zero energy")
    return calibrate_gain(probe_field(scene, which), src.target_spl, mapping)


def with_mic(scene: SceneConfig, mic: MicSpec) -> SceneConfig:
    return replace(scene, mic=mic)
