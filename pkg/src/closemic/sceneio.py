"""JSON scene description files.

Field names carry units (``distance_m``, ``spl_db``, ``rt60_s``).  Unknown
keys are rejected so a typo cannot silently fall back to a default.
"""

from __future__ import annotations

import json
import math

from .campaign import CampaignConfig
from .errors import ConfigError
from .scene import Directivity, MicSpec, Role, RoomSpec, SceneConfig, SourceSpec
from .signals import LevelMapping, gen_pink_noise, gen_riff

_SIGNAL_KINDS = ("pink", "riff")


def _require_keys(doc: dict, allowed: set, required: set, where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")


def _build_signal(doc: dict, duration_s: float, sample_rate: int, where: str):
    _require_keys(
        doc,
        {"kind", "seed", "fundamental_hz", "pattern_period_s"},
        {"kind", "seed"},
        where,
    )
    kind = doc["kind"]
    if kind == "pink":
        return gen_pink_noise(duration_s, sample_rate, doc["seed"])
    if kind == "riff":
        return gen_riff(
            duration_s,
            sample_rate,
            doc.get("fundamental_hz", 196.0),
            doc.get("pattern_period_s", 1.5),
            doc["seed"],
        )
    raise ConfigError(f"{where}: signal kind must be one of {_SIGNAL_KINDS}, got {kind!r}")


def parse_scene_doc(doc: dict) -> tuple[SceneConfig, LevelMapping, dict]:
    """Build a SceneConfig from a parsed scene document.

    Returns the scene, the level mapping, and the raw document (kept for
    campaign-template conversion).
    """
    _require_keys(
        doc,
        {"sample_rate_hz", "duration_s", "ref_distance_m", "full_scale_spl_db",
         "room", "mic", "target", "noise"},
        {"sample_rate_hz", "duration_s", "room", "mic", "target", "noise"},
        "scene",
    )
    sample_rate = int(doc["sample_rate_hz"])
    duration_s = float(doc["duration_s"])
    mapping = LevelMapping(float(doc.get("full_scale_spl_db", 120.0)))

    room_doc = doc["room"]
    _require_keys(room_doc, {"rt60_s", "volume_m3", "reverb_seed"},
                  {"rt60_s", "volume_m3", "reverb_seed"}, "scene.room")
    room = RoomSpec(float(room_doc["rt60_s"]), float(room_doc["volume_m3"]),
                    int(room_doc["reverb_seed"]))

    mic_doc = doc["mic"]
    _require_keys(mic_doc, {"position_m", "axis_angle_deg", "directivity"},
                  {"position_m", "axis_angle_deg", "directivity"}, "scene.mic")
    try:
        directivity = Directivity(mic_doc["directivity"])
    except ValueError:
        raise ConfigError(
            f"scene.mic: directivity must be 'omni' or 'cardioid', got {mic_doc['directivity']!r}"
        ) from None
    mic = MicSpec(tuple(mic_doc["position_m"]), float(mic_doc["axis_angle_deg"]), directivity)

    sources = {}
    for role in (Role.TARGET, Role.NOISE):
        src_doc = doc[role.value]
        _require_keys(src_doc, {"position_m", "spl_db", "signal"},
                      {"position_m", "spl_db", "signal"}, f"scene.{role.value}")
        signal = _build_signal(src_doc["signal"], duration_s, sample_rate,
                               f"scene.{role.value}.signal")
        sources[role] = SourceSpec(signal, tuple(src_doc["position_m"]),
                                   float(src_doc["spl_db"]), role)

    scene = SceneConfig(
        target=sources[Role.TARGET],
        noise=sources[Role.NOISE],
        mic=mic,
        room=room,
        sample_rate=sample_rate,
        ref_distance=float(doc.get("ref_distance_m", 1.0)),
    )
    return scene, mapping, doc


def load_scene(path) -> tuple[SceneConfig, LevelMapping, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scene_doc(json.load(fh))


def scene_doc_to_campaign_template(doc: dict) -> tuple[CampaignConfig, float, float]:
    """Convert a scene document into a placement-search template.

    The mic placement in the file is ignored (the search varies it); the
    noise loudspeaker geometry is re-expressed as distance plus incidence
    relative to the mic-to-target axis.  Returns the template config plus
    the two source SPLs.
    """
    scene, mapping, _ = parse_scene_doc(doc)
    if doc["target"]["signal"]["kind"] != "riff" or doc["noise"]["signal"]["kind"] != "pink":
        raise ConfigError("placement search expects a riff target and a pink-noise interferer")

    mic = scene.mic.position
    to_target = (scene.target.position[0] - mic[0], scene.target.position[1] - mic[1])
    to_noise = (scene.noise.position[0] - mic[0], scene.noise.position[1] - mic[1])
    noise_distance = math.hypot(*to_noise)
    base = math.degrees(math.atan2(to_target[1], to_target[0]))
    bearing = math.degrees(math.atan2(to_noise[1], to_noise[0]))
    incidence = abs((bearing - base + 180.0) % 360.0 - 180.0)

    target_sig = doc["target"]["signal"]
    config = CampaignConfig(
        duration_s=float(doc["duration_s"]),
        sample_rate=scene.sample_rate,
        pink_seed=int(doc["noise"]["signal"]["seed"]),
        riff_seed=int(target_sig["seed"]),
        riff_fundamental_hz=float(target_sig.get("fundamental_hz", 196.0)),
        riff_pattern_period_s=float(target_sig.get("pattern_period_s", 1.5)),
        full_scale_spl_db=mapping.full_scale_spl,
        rt60_s=scene.room.rt60,
        room_volume_m3=scene.room.volume,
        reverb_seed=scene.room.reverb_seed,
        noise_distance_m=noise_distance,
        noise_incidence_deg=incidence,
        ref_distance_m=scene.ref_distance,
    )
    return config, scene.target.target_spl, scene.noise.target_spl
