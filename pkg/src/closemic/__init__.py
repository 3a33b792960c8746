"""Deterministic close-miking simulator and SIR evaluation toolkit."""

from .campaign import (
    CampaignConfig,
    Condition,
    SirGrid,
    enumerate_conditions,
    export_grid,
    import_grid,
    run_campaign,
    run_condition,
)
from .metrics import SirResult, binary_mask, evaluate_pair, sir, sir_oracle
from .scene import (
    Directivity,
    MicSpec,
    Role,
    RoomSpec,
    SceneConfig,
    SourceSpec,
    calibrate_source,
    directivity_gain,
    propagate_direct,
    render_capture,
    render_reverb_tail,
)
from .search import PlacementResult, SearchSpace, optimize_placement
from .signals import LevelMapping, SignalBuffer, calibrate_gain, gen_pink_noise, gen_riff, leq
from .spectral import Spectrogram, StftParams, magnitude, stft

__version__ = "0.1.0"

__all__ = [
    "CampaignConfig", "Condition", "SirGrid", "enumerate_conditions", "export_grid",
    "import_grid", "run_campaign", "run_condition",
    "SirResult", "binary_mask", "evaluate_pair", "sir", "sir_oracle",
    "Directivity", "MicSpec", "Role", "RoomSpec", "SceneConfig", "SourceSpec",
    "calibrate_source", "directivity_gain", "propagate_direct", "render_capture",
    "render_reverb_tail",
    "PlacementResult", "SearchSpace", "optimize_placement",
    "LevelMapping", "SignalBuffer", "calibrate_gain", "gen_pink_noise", "gen_riff", "leq",
    "Spectrogram", "StftParams", "magnitude", "stft",
]
