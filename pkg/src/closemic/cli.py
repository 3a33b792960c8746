"""Command-line interface.

Thin dispatcher over the core modules.  Exit codes: 0 success,
2 argument/config error, 3 I/O error, 4 numerical/contract error.
All flag names carry units; flags override config-file values.
"""

from __future__ import annotations

import functools
import json
import math
import os
import sys

import click

from . import campaign as camp
from .errors import ArgumentError, CalibrationError, ContractError
from .metrics import evaluate_pair
from .scene import Role, calibrate_source, render_capture
from .sceneio import load_scene, scene_doc_to_campaign_template
from .search import SearchSpace, optimize_placement
from .signals import leq
from .spectral import StftParams
from .wavio import read_wav, write_wav

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


def _handled(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except ArgumentError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_ARGUMENT)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(EXIT_IO)
        except (ContractError, CalibrationError) as exc:
            click.echo(f"numerical error: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)

    return wrapper


def _result_doc(result) -> dict:
    return {
        "sir_db": "inf" if math.isinf(result.sir_db) else result.sir_db,
        "masked_source_energy": result.masked_source_energy,
        "masked_noise_energy": result.masked_noise_energy,
        "mask_density": result.mask_density,
    }


def _write_wav_atomic(path, buffer):
    tmp = f"{path}.tmp"
    write_wav(tmp, buffer)
    os.replace(tmp, path)


@click.group()
def main():
    """Deterministic close-miking simulator and SIR evaluation toolkit."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="Campaign config JSON; defaults are the bundled campaign.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for grid.csv and grid.json.")
@click.option("--fast", is_flag=True, help="Use 2 s signals instead of 15 s.")
@click.option("--dump-wav", is_flag=True, help="Also write per-condition capture WAVs.")
@_handled
def campaign(config_path, out_dir, fast, dump_wav):
    """Run the full recording-campaign simulation and export the SIR grid."""
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            config = camp.CampaignConfig.from_dict(json.load(fh))
    else:
        config = camp.CampaignConfig()
    if fast:
        config = config.fast()

    os.makedirs(out_dir, exist_ok=True)

    def progress(cond, result):
        sir = "inf" if math.isinf(result.sir_db) else f"{result.sir_db:.2f}"
        click.echo(
            f"{cond.mic_kind} ang={cond.angle_deg} d={cond.distance_m:.2f}m "
            f"spl_s={cond.source_spl_db:g} spl_n={cond.noise_spl_db:g} sir={sir} dB",
            err=True,
        )

    grid = camp.run_campaign(config, progress=progress)
    camp.export_grid(grid, "csv", os.path.join(out_dir, "grid.csv"))
    camp.export_grid(grid, "json", os.path.join(out_dir, "grid.json"))

    if dump_wav:
        wav_dir = os.path.join(out_dir, "wav")
        os.makedirs(wav_dir, exist_ok=True)
        renderer = camp.Renderer(config)
        for cond, _ in grid.rows:
            source, noise = renderer.captures_for(cond)
            stem = (f"{cond.mic_kind}_ang{cond.angle_deg}_d{cond.distance_m:.2f}"
                    f"_s{cond.source_spl_db:g}_n{cond.noise_spl_db:g}")
            _write_wav_atomic(os.path.join(wav_dir, f"{stem}_source.wav"), source)
            _write_wav_atomic(os.path.join(wav_dir, f"{stem}_noise.wav"), noise)

    click.echo(f"wrote {len(grid)} conditions to {out_dir}")


@main.command()
@click.option("--source", "source_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Source-only capture WAV.")
@click.option("--noise", "noise_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Noise-only capture WAV.")
@click.option("--frame", default=2048, show_default=True, help="Analysis frame length, samples.")
@click.option("--hop", default=1024, show_default=True, help="Hop length, samples.")
@click.option("--window", default="hann", show_default=True,
              type=click.Choice(["hann", "rectangular"]), help="Analysis window.")
@_handled
def sir(source_path, noise_path, frame, hop, window):
    """Evaluate SIR for one capture pair; prints JSON on stdout."""
    params = StftParams(frame, hop, window)
    result = evaluate_pair(read_wav(source_path), read_wav(noise_path), params)
    click.echo(json.dumps(_result_doc(result), indent=2))


@main.command()
@click.option("--scene", "scene_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Scene description JSON.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for the rendered WAV pair.")
@_handled
def simulate(scene_path, out_dir):
    """Render the calibrated source-only and noise-only captures of a scene."""
    scene, mapping, _ = load_scene(scene_path)
    os.makedirs(out_dir, exist_ok=True)
    summary = {}
    for role, name in ((Role.TARGET, "target"), (Role.NOISE, "noise")):
        gain = calibrate_source(scene, role, mapping)
        capture = render_capture(scene, role, gain)
        _write_wav_atomic(os.path.join(out_dir, f"{name}.wav"), capture)
        summary[name] = {
            "calibration_gain": gain,
            "captured_leq_db": leq(capture, mapping),
            "target_spl_db": scene.source(role).target_spl,
        }
    doc = json.dumps(summary, indent=2) + "\n"
    camp._write_atomic(os.path.join(out_dir, "summary.json"), doc)
    click.echo(f"wrote capture pair to {out_dir}")


@main.command()
@click.option("--scene", "scene_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Scene description JSON.")
@click.option("--dist-min-m", default=0.03, show_default=True, help="Minimum mic distance, m.")
@click.option("--dist-max-m", default=1.0, show_default=True, help="Maximum mic distance, m.")
@click.option("--angle-min-deg", default=0.0, show_default=True, help="Minimum mic angle, deg.")
@click.option("--angle-max-deg", default=45.0, show_default=True, help="Maximum mic angle, deg.")
@click.option("--grid", default="8x4", show_default=True,
              help="Coarse grid resolution as N_DISTxN_ANGLE.")
@click.option("--tol-m", default=0.005, show_default=True,
              help="Golden-section distance tolerance, m.")
@_handled
def optimize(scene_path, dist_min_m, dist_max_m, angle_min_deg, angle_max_deg, grid, tol_m):
    """Search the (distance, angle) placement maximizing simulated SIR."""
    try:
        n_dist, n_angle = (int(part) for part in grid.lower().split("x"))
    except ValueError:
        raise ArgumentError(f"--grid must look like 8x4, got {grid!r}") from None
    with open(scene_path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    config, source_spl, noise_spl = scene_doc_to_campaign_template(doc)
    space = SearchSpace(
        distance_bounds_m=(dist_min_m, dist_max_m),
        angle_bounds_deg=(angle_min_deg, angle_max_deg),
        grid_resolution=(n_dist, n_angle),
        refine_tolerance_m=tol_m,
    )
    result = optimize_placement(config, space, source_spl, noise_spl)
    click.echo(json.dumps({
        "best_distance_m": result.best_distance_m,
        "best_angle_deg": result.best_angle_deg,
        "best_sir_db": result.best_sir_db,
        "evaluations": result.evaluations,
        "trace": [list(entry) for entry in result.trace],
    }, indent=2))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service exposing the same operations."""
    import uvicorn

    uvicorn.run("closemic.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
