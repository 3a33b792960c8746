"""Microphone placement search: coarse grid plus golden-section refinement.

The objective is the simulated SIR of a (distance, angle) placement, with
each source recalibrated at the candidate position exactly as in the
campaign.  Angles stay on the coarse grid (the interesting angle set is
discrete); the distance is refined by golden section at the best angle.
Masked-spectrum SIR surfaces are mildly non-smooth, so refinement runs on
a 3-point-median-smoothed objective and falls back to the raw best grid
point if it regresses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .campaign import CampaignConfig, Condition, Renderer
from .errors import ArgumentError
from .scene import MIN_DISTANCE_M

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchSpace:
    distance_bounds_m: tuple[float, float]
    angle_bounds_deg: tuple[float, float]
    grid_resolution: tuple[int, int] = (8, 4)  # (n_dist, n_angle)
    refine_tolerance_m: float = 0.005

    def __post_init__(self):
        d_lo, d_hi = self.distance_bounds_m
        a_lo, a_hi = self.angle_bounds_deg
        if not (MIN_DISTANCE_M <= d_lo < d_hi):
            raise ArgumentError(f"bad distance bounds {self.distance_bounds_m!r}")
        if a_lo > a_hi:
            raise ArgumentError(f"bad angle bounds {self.angle_bounds_deg!r}")
        if self.grid_resolution[0] < 2 or self.grid_resolution[1] < 1:
            raise ArgumentError(f"grid resolution too small: {self.grid_resolution!r}")
        if not (self.refine_tolerance_m > 0):
            raise ArgumentError("refine_tolerance_m must be positive")


@dataclass
class PlacementResult:
    best_distance_m: float
    best_angle_deg: float
    best_sir_db: float
    evaluations: int
    trace: list  # (distance_m, angle_deg, sir_db)


class _Objective:
    def __init__(self, renderer: Renderer, source_spl: float, noise_spl: float):
        self.renderer = renderer
        self.source_spl = source_spl
        self.noise_spl = noise_spl
        self.trace = []
        self._memo = {}

    def __call__(self, distance_m: float, angle_deg: float) -> float:
        key = (distance_m, angle_deg)
        if key not in self._memo:
            cond = Condition(
                "cardioid", angle_deg, 0, distance_m,
                self.source_spl, self.noise_spl, ("", ""),
            )
            value = self.renderer.evaluate(cond).sir_db
            self._memo[key] = value
            self.trace.append((distance_m, angle_deg, value))
        return self._memo[key]


def optimize_placement(
    config: CampaignConfig,
    space: SearchSpace,
    source_spl_db: float = 100.0,
    noise_spl_db: float = 94.0,
) -> PlacementResult:
    """Find the (distance, angle) of maximum simulated SIR.

    ``config`` fixes everything about the scene except the mic placement;
    the microphone is the cardioid one (the only pattern for which the
    angle matters).
    """
    renderer = Renderer(config)
    objective = _Objective(renderer, source_spl_db, noise_spl_db)

    n_dist, n_angle = space.grid_resolution
    distances = np.linspace(*space.distance_bounds_m, n_dist)
    a_lo, a_hi = space.angle_bounds_deg
    angles = np.linspace(a_lo, a_hi, n_angle) if a_hi > a_lo else np.array([a_lo])

    best = (-math.inf, None, None)
    for angle in angles:
        for distance in distances:
            value = objective(float(distance), float(angle))
            if value > best[0]:
                best = (value, float(distance), float(angle))
    best_angle = best[2]

    # Median of three closely spaced probes; robust to mask-flip jitter.
    delta = space.refine_tolerance_m
    d_lo, d_hi = space.distance_bounds_m

    def smoothed(d: float) -> float:
        probes = [max(d_lo, d - delta), d, min(d_hi, d + delta)]
        return float(np.median([objective(p, best_angle) for p in probes]))

    a, b = d_lo, d_hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    f_c, f_d = smoothed(c), smoothed(d)
    while b - a > space.refine_tolerance_m:
        if f_c > f_d:
            b, d, f_d = d, c, f_c
            c = b - _INVPHI * (b - a)
            f_c = smoothed(c)
        else:
            a, c, f_c = c, d, f_d
            d = a + _INVPHI * (b - a)
            f_d = smoothed(d)
    refined_d = (a + b) / 2.0
    objective(refined_d, best_angle)

    # The answer is the best raw evaluation seen anywhere (grid, smoothing
    # probes, or refined midpoint); a regressing refinement cannot win.
    best_sir, best_d, best_angle = max(
        (value, distance, angle) for distance, angle, value in objective.trace
    )

    return PlacementResult(
        best_distance_m=best_d,
        best_angle_deg=best_angle,
        best_sir_db=best_sir,
        evaluations=len(objective.trace),
        trace=objective.trace,
    )
