"""HTTP service exposing the simulator and evaluation pipeline.

Run with ``closemic serve`` or ``uvicorn closemic.service:app``.  Request
and response bodies are pydantic models; the +inf SIR sentinel is carried
as the string ``"inf"`` (JSON has no infinity).
"""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import campaign as camp
from .errors import ArgumentError, CloseMicError
from .metrics import SirResult, evaluate_pair
from .scene import Role, calibrate_source, render_capture
from .sceneio import parse_scene_doc, scene_doc_to_campaign_template
from .search import SearchSpace, optimize_placement
from .signals import SignalBuffer, leq
from .spectral import StftParams


class SignalPayload(BaseModel):
    samples: list[float]
    sample_rate_hz: int

    def to_buffer(self) -> SignalBuffer:
        return SignalBuffer(self.samples, self.sample_rate_hz)


class StftOptions(BaseModel):
    frame_length: int = 2048
    hop_length: int = 1024
    window: str = "hann"

    def to_params(self) -> StftParams:
        return StftParams(self.frame_length, self.hop_length, self.window)


class SirRequest(BaseModel):
    source: SignalPayload
    noise: SignalPayload
    stft: StftOptions = Field(default_factory=StftOptions)


class SirResponse(BaseModel):
    sir_db: float | str
    masked_source_energy: float
    masked_noise_energy: float
    mask_density: float

    @classmethod
    def from_result(cls, result: SirResult) -> "SirResponse":
        return cls(
            sir_db="inf" if math.isinf(result.sir_db) else result.sir_db,
            masked_source_energy=result.masked_source_energy,
            masked_noise_energy=result.masked_noise_energy,
            mask_density=result.mask_density,
        )


class SimulateRequest(BaseModel):
    scene: dict
    include_samples: bool = False


class CaptureSummary(BaseModel):
    calibration_gain: float
    captured_leq_db: float
    target_spl_db: float
    samples: list[float] | None = None


class SimulateResponse(BaseModel):
    sample_rate_hz: int
    target: CaptureSummary
    noise: CaptureSummary


class CampaignRequest(BaseModel):
    config: dict = Field(default_factory=dict)
    fast: bool = True


class CampaignResponse(BaseModel):
    metadata: dict
    rows: list[dict]


class OptimizeRequest(BaseModel):
    scene: dict
    dist_min_m: float = 0.03
    dist_max_m: float = 1.0
    angle_min_deg: float = 0.0
    angle_max_deg: float = 45.0
    n_dist: int = 8
    n_angle: int = 4
    tol_m: float = 0.005


class OptimizeResponse(BaseModel):
    best_distance_m: float
    best_angle_deg: float
    best_sir_db: float
    evaluations: int
    trace: list[tuple[float, float, float]]


def create_app() -> FastAPI:
    app = FastAPI(title="closemic", version="0.1.0")

    @app.exception_handler(CloseMicError)
    async def _toolkit_error(request, exc):
        raise HTTPException(
            status_code=422 if isinstance(exc, ArgumentError) else 409,
            detail=str(exc),
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/sir", response_model=SirResponse)
    def sir_endpoint(request: SirRequest):
        result = evaluate_pair(
            request.source.to_buffer(),
            request.noise.to_buffer(),
            request.stft.to_params(),
        )
        return SirResponse.from_result(result)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate_endpoint(request: SimulateRequest):
        scene, mapping, _ = parse_scene_doc(request.scene)
        summaries = {}
        for role in (Role.TARGET, Role.NOISE):
            gain = calibrate_source(scene, role, mapping)
            capture = render_capture(scene, role, gain)
            summaries[role.value] = CaptureSummary(
                calibration_gain=gain,
                captured_leq_db=leq(capture, mapping),
                target_spl_db=scene.source(role).target_spl,
                samples=capture.samples.tolist() if request.include_samples else None,
            )
        return SimulateResponse(
            sample_rate_hz=scene.sample_rate,
            target=summaries["target"],
            noise=summaries["noise"],
        )

    @app.post("/campaign", response_model=CampaignResponse)
    def campaign_endpoint(request: CampaignRequest):
        config = camp.CampaignConfig.from_dict(request.config)
        if request.fast:
            config = config.fast()
        grid = camp.run_campaign(config)
        doc = camp.grid_to_json_doc(grid)
        return CampaignResponse(metadata=doc["metadata"], rows=doc["rows"])

    @app.post("/optimize", response_model=OptimizeResponse)
    def optimize_endpoint(request: OptimizeRequest):
        config, source_spl, noise_spl = scene_doc_to_campaign_template(request.scene)
        space = SearchSpace(
            distance_bounds_m=(request.dist_min_m, request.dist_max_m),
            angle_bounds_deg=(request.angle_min_deg, request.angle_max_deg),
            grid_resolution=(request.n_dist, request.n_angle),
            refine_tolerance_m=request.tol_m,
        )
        result = optimize_placement(config, space, source_spl, noise_spl)
        return OptimizeResponse(
            best_distance_m=result.best_distance_m,
            best_angle_deg=result.best_angle_deg,
            best_sir_db=result.best_sir_db,
            evaluations=result.evaluations,
            trace=result.trace,
        )

    return app


app = create_app()
