"""Measurement-campaign enumeration, rendering, and grid export.

The campaign sweeps microphone kind and axis angle, source-mic distance,
and the SPL of both sources, mirroring the recording-set structure of a
close-miking study: for each condition a source-only and a noise-only
capture are rendered (each calibrated alone at the mic position) and SIR
is evaluated on the pair.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field, asdict

from .errors import ArgumentError, ConfigError
from .metrics import SirResult, evaluate_pair
from .scene import (
    Directivity,
    MicSpec,
    Role,
    RoomSpec,
    SceneConfig,
    SourceSpec,
    calibrate_source,
    render_capture,
)
from .signals import LevelMapping, SignalBuffer, gen_pink_noise, gen_riff
from .spectral import StftParams

SCHEMA_VERSION = 1

MAIN_DISTANCES_M = (0.03, 0.06, 0.09, 0.12, 0.15, 0.18, 0.21, 0.24, 0.27, 0.30, 0.65, 1.00)
ANGLED_DISTANCES_M = MAIN_DISTANCES_M[:5]
SOURCE_SPLS_DB = (100.0, 97.0, 94.0)
NOISE_SPLS_DB = (100.0, 97.0, 94.0, 91.0, 88.0)

CSV_COLUMNS = ("mic", "angle_deg", "distance_m", "source_spl_db", "noise_spl_db",
               "sir_db", "mask_density")

#: (mic kind, axis angle) blocks in campaign order, with the recording-set
#: labels of the (noise-active, source-active) pair they correspond to.
_BLOCKS = (
    ("omni", 0, ("R1", "R2")),
    ("cardioid", 0, ("R3", "R4")),
    ("cardioid", 30, ("R5", "R6")),
    ("cardioid", 45, ("R7", "R8")),
)


@dataclass(frozen=True)
class CampaignConfig:
    duration_s: float = 15.0
    sample_rate: int = 44100
    pink_seed: int = 7
    riff_seed: int = 1
    riff_fundamental_hz: float = 196.0
    riff_pattern_period_s: float = 1.5
    full_scale_spl_db: float = 120.0
    rt60_s: float = 1.2
    room_volume_m3: float = 3000.0
    reverb_seed: int = 42
    noise_distance_m: float = 2.0
    # Fully lateral interferer: gives the cardioid the diffuse-plus-direct
    # rejection the directivity model predicts while keeping a clear
    # benefit from angling the mic further away.
    noise_incidence_deg: float = 90.0
    ref_distance_m: float = 1.0
    stft: StftParams = field(default_factory=StftParams)
    main_distances_m: tuple = MAIN_DISTANCES_M
    angled_distances_m: tuple = ANGLED_DISTANCES_M
    source_spls_db: tuple = SOURCE_SPLS_DB
    noise_spls_db: tuple = NOISE_SPLS_DB

    def __post_init__(self):
        if not (self.duration_s > 0):
            raise ConfigError("duration_s must be positive")
        if list(self.main_distances_m) != sorted(self.main_distances_m):
            raise ConfigError("main_distances_m must be strictly increasing")
        if tuple(self.angled_distances_m) != tuple(self.main_distances_m[: len(self.angled_distances_m)]):
            raise ConfigError("angled_distances_m must be a prefix of main_distances_m")

    def fast(self) -> "CampaignConfig":
        """2-second variant for quick runs; trends must hold in both modes."""
        from dataclasses import replace

        return replace(self, duration_s=2.0)

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        data = dict(data)
        stft_doc = data.pop("stft", None)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("main_distances_m", "angled_distances_m", "source_spls_db", "noise_spls_db"):
            if key in data:
                data[key] = tuple(data[key])
        kwargs = dict(data)
        if stft_doc is not None:
            stft_known = {"frame_length", "hop_length", "window"}
            stft_unknown = set(stft_doc) - stft_known
            if stft_unknown:
                raise ConfigError(f"unknown stft keys: {sorted(stft_unknown)}")
            kwargs["stft"] = StftParams(**stft_doc)
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["stft"] = {"frame_length": self.stft.frame_length,
                       "hop_length": self.stft.hop_length,
                       "window": self.stft.window}
        for key in ("main_distances_m", "angled_distances_m", "source_spls_db", "noise_spls_db"):
            doc[key] = list(doc[key])
        return doc


@dataclass(frozen=True)
class Condition:
    mic_kind: str
    angle_deg: int
    distance_index: int  # 1-based, matching the distance table
    distance_m: float
    source_spl_db: float
    noise_spl_db: float
    recording_sets: tuple[str, str]


@dataclass
class SirGrid:
    rows: list  # list of (Condition, SirResult)
    metadata: dict

    def __len__(self):
        return len(self.rows)


def enumerate_conditions(config: CampaignConfig = CampaignConfig()) -> list[Condition]:
    """All campaign conditions in stable (mic, angle, distance, SPL) order."""
    conditions = []
    for mic_kind, angle, sets in _BLOCKS:
        distances = config.main_distances_m if angle == 0 else config.angled_distances_m
        for i_d, distance in enumerate(distances, start=1):
            for spl_s in config.source_spls_db:
                for spl_n in config.noise_spls_db:
                    conditions.append(
                        Condition(mic_kind, angle, i_d, distance, spl_s, spl_n, sets)
                    )
    return conditions


class Renderer:
    """Caches per-geometry captures and calibration levels for a campaign.

    Captures at unit gain and probe levels depend only on geometry, so one
    render per (mic, angle, distance, role) serves every SPL combination.
    """

    def __init__(self, config: CampaignConfig):
        self.config = config
        self.mapping = LevelMapping(config.full_scale_spl_db)
        self.riff = gen_riff(
            config.duration_s,
            config.sample_rate,
            config.riff_fundamental_hz,
            config.riff_pattern_period_s,
            config.riff_seed,
        )
        self.pink = gen_pink_noise(config.duration_s, config.sample_rate, config.pink_seed)
        self.room = RoomSpec(config.rt60_s, config.room_volume_m3, config.reverb_seed)
        inc = math.radians(config.noise_incidence_deg)
        self._noise_pos = (
            config.noise_distance_m * math.cos(inc),
            config.noise_distance_m * math.sin(inc),
        )
        self._captures: dict = {}
        self._probe_leq: dict = {}

    def scene(self, mic_kind: str, angle_deg: float, distance_m: float,
              source_spl_db: float = 0.0, noise_spl_db: float = 0.0) -> SceneConfig:
        """Scene for one placement: mic at origin, target on the +x axis."""
        try:
            directivity = Directivity(mic_kind)
        except ValueError:
            raise ArgumentError(f"unknown microphone kind {mic_kind!r}") from None
        return SceneConfig(
            target=SourceSpec(self.riff, (distance_m, 0.0), source_spl_db, Role.TARGET),
            noise=SourceSpec(self.pink, self._noise_pos, noise_spl_db, Role.NOISE),
            mic=MicSpec((0.0, 0.0), angle_deg, directivity),
            room=self.room,
            sample_rate=self.config.sample_rate,
            ref_distance=self.config.ref_distance_m,
        )

    def _capture_key(self, mic_kind, angle_deg, distance_m, role):
        # Noise geometry does not depend on the target distance.
        if role is Role.NOISE:
            return (mic_kind, angle_deg, "noise")
        return (mic_kind, angle_deg, distance_m, "target")

    def unit_capture(self, mic_kind, angle_deg, distance_m, role: Role) -> SignalBuffer:
        key = self._capture_key(mic_kind, angle_deg, distance_m, role)
        if key not in self._captures:
            scene = self.scene(mic_kind, angle_deg, distance_m)
            self._captures[key] = render_capture(scene, role)
        return self._captures[key]

    def calibration_gain(self, distance_m: float, role: Role, target_spl: float) -> float:
        key = distance_m if role is Role.TARGET else "noise"
        if (role, key) not in self._probe_leq:
            scene = self.scene("omni", 0.0, distance_m, target_spl, target_spl)
            # calibrate_source returns the gain for this exact target; cache
            # the underlying probe level so any SPL reuses the render.
            gain = calibrate_source(scene, role, self.mapping)
            self._probe_leq[(role, key)] = target_spl - 20.0 * math.log10(gain)
        return 10.0 ** ((target_spl - self._probe_leq[(role, key)]) / 20.0)

    def captures_for(self, cond: Condition) -> tuple[SignalBuffer, SignalBuffer]:
        """Calibrated (source-only, noise-only) capture pair for a condition."""
        g_s = self.calibration_gain(cond.distance_m, Role.TARGET, cond.source_spl_db)
        g_n = self.calibration_gain(cond.distance_m, Role.NOISE, cond.noise_spl_db)
        source = self.unit_capture(cond.mic_kind, cond.angle_deg, cond.distance_m, Role.TARGET)
        noise = self.unit_capture(cond.mic_kind, cond.angle_deg, cond.distance_m, Role.NOISE)
        return source.scaled(g_s), noise.scaled(g_n)

    def evaluate(self, cond: Condition) -> SirResult:
        source, noise = self.captures_for(cond)
        return evaluate_pair(source, noise, self.config.stft)


def run_condition(cond: Condition, config: CampaignConfig = CampaignConfig(),
                  renderer: Renderer | None = None) -> SirResult:
    """Render and evaluate a single campaign condition."""
    if renderer is None:
        renderer = Renderer(config)
    return renderer.evaluate(cond)


def run_campaign(config: CampaignConfig = CampaignConfig(),
                 progress=None) -> SirGrid:
    """Evaluate the full condition grid; deterministic for a fixed config."""
    renderer = Renderer(config)
    rows = []
    for cond in enumerate_conditions(config):
        result = renderer.evaluate(cond)
        rows.append((cond, result))
        if progress is not None:
            progress(cond, result)
    metadata = {
        "schema_version": SCHEMA_VERSION,
        "config": config.to_dict(),
        "n_conditions": len(rows),
    }
    return SirGrid(rows, metadata)


def _format_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.6f}"


def grid_to_csv_text(grid: SirGrid) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for cond, result in grid.rows:
        writer.writerow([
            cond.mic_kind,
            cond.angle_deg,
            f"{cond.distance_m:.2f}",
            f"{cond.source_spl_db:g}",
            f"{cond.noise_spl_db:g}",
            _format_db(result.sir_db),
            f"{result.mask_density:.6f}",
        ])
    return buf.getvalue()


def grid_to_json_doc(grid: SirGrid) -> dict:
    rows = []
    for cond, result in grid.rows:
        rows.append({
            "mic": cond.mic_kind,
            "angle_deg": cond.angle_deg,
            "distance_index": cond.distance_index,
            "distance_m": cond.distance_m,
            "source_spl_db": cond.source_spl_db,
            "noise_spl_db": cond.noise_spl_db,
            "recording_sets": list(cond.recording_sets),
            "sir_db": "inf" if math.isinf(result.sir_db) else result.sir_db,
            "masked_source_energy": result.masked_source_energy,
            "masked_noise_energy": result.masked_noise_energy,
            "mask_density": result.mask_density,
        })
    return {"metadata": grid.metadata, "rows": rows}


def grid_from_json_doc(doc: dict) -> SirGrid:
    rows = []
    for row in doc["rows"]:
        cond = Condition(
            row["mic"],
            row["angle_deg"],
            row["distance_index"],
            row["distance_m"],
            row["source_spl_db"],
            row["noise_spl_db"],
            tuple(row["recording_sets"]),
        )
        sir_db = math.inf if row["sir_db"] == "inf" else row["sir_db"]
        result = SirResult(
            sir_db,
            row["masked_source_energy"],
            row["masked_noise_energy"],
            row["mask_density"],
        )
        rows.append((cond, result))
    return SirGrid(rows, doc["metadata"])


def _write_atomic(path, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def export_grid(grid: SirGrid, fmt: str, path) -> None:
    """Serialize the grid as CSV or JSON (written atomically)."""
    if fmt == "csv":
        _write_atomic(path, grid_to_csv_text(grid))
    elif fmt == "json":
        _write_atomic(path, json.dumps(grid_to_json_doc(grid), indent=2) + "\n")
    else:
        raise ArgumentError(f"unknown export format {fmt!r}")


def import_grid(path) -> SirGrid:
    with open(path, "r", encoding="utf-8") as fh:
        return grid_from_json_doc(json.load(fh))
